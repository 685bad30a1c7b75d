#include "koopmon/hybrid_models.hpp"

#include <cmath>
#include <utility>

#include "koopmon/errors.hpp"

namespace koopmon {

HybridHamiltonian::HybridHamiltonian(std::string name, double mass, PhaseFn classical,
                                     PhaseFn classical_dq, PhaseFn classical_dp,
                                     ElectronicFn electronic, ElectronicFn electronic_dq,
                                     bool separable)
    : name_(std::move(name)),
      mass_(mass),
      classical_(std::move(classical)),
      classical_dq_(std::move(classical_dq)),
      classical_dp_(std::move(classical_dp)),
      electronic_(std::move(electronic)),
      electronic_dq_(std::move(electronic_dq)),
      separable_(separable) {
  if (!(mass_ > 0.0)) throw ConfigError("hybrid Hamiltonian needs a positive mass");
}

PauliVector HybridHamiltonian::operator()(double q, double p) const {
  PauliVector h = electronic_(q);
  h.h0 += classical_(q, p);
  return h;
}

PauliVector HybridHamiltonian::grad_q(double q, double p) const {
  PauliVector g = electronic_dq_(q);
  g.h0 += classical_dq_(q, p);
  return g;
}

PauliVector HybridHamiltonian::grad_p(double q, double p) const {
  return {classical_dp_(q, p), 0.0, 0.0, 0.0};
}

TullyParams TullyParams::defaults(TullyVariant v) {
  TullyParams t;
  t.variant = v;
  switch (v) {
    case TullyVariant::I:
      t.a = 0.01; t.b = 1.6; t.c = 0.005; t.d = 1.0;
      break;
    case TullyVariant::II:
      t.a = 0.05; t.b = 0.28; t.c = 0.015; t.d = 0.06; t.e0 = 0.025;
      break;
    case TullyVariant::III:
      t.a = 0.0006; t.b = 0.1; t.c = 0.9;
      break;
  }
  return t;
}

RabiParams RabiParams::defaults(RabiRegime r) {
  RabiParams p;
  if (r == RabiRegime::ultrastrong) {
    p.gamma = 0.29; p.c0 = 0.35; p.name = "rabi_us";
  } else {
    p.gamma = 1.85; p.c0 = 0.1; p.name = "rabi_ds";
  }
  return p;
}

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

HybridHamiltonian::ElectronicFn tully_value(const TullyParams& t) {
  const double a = t.a, b = t.b, c = t.c, d = t.d, e0 = t.e0;
  switch (t.variant) {
    case TullyVariant::I:
      return [=](double q) {
        return PauliVector{0.0, c * std::exp(-d * q * q), 0.0,
                           a * sgn(q) * (1.0 - std::exp(-b * std::abs(q)))};
      };
    case TullyVariant::II:
      return [=](double q) {
        const double h0 = e0 - a * std::exp(-b * q * q);
        return PauliVector{h0, c * std::exp(-d * q * q), 0.0, -h0};
      };
    case TullyVariant::III:
    default:
      return [=](double q) {
        // q = 0 takes the left branch; both equal b there.
        const double h1 = q > 0.0 ? b * (2.0 - std::exp(-c * q)) : b * std::exp(c * q);
        return PauliVector{0.0, h1, 0.0, a};
      };
  }
}

HybridHamiltonian::ElectronicFn tully_derivative(const TullyParams& t) {
  const double a = t.a, b = t.b, c = t.c, d = t.d;
  switch (t.variant) {
    case TullyVariant::I:
      return [=](double q) {
        return PauliVector{0.0, -2.0 * d * q * c * std::exp(-d * q * q), 0.0,
                           a * b * std::exp(-b * std::abs(q))};
      };
    case TullyVariant::II:
      return [=](double q) {
        const double dh0 = 2.0 * a * b * q * std::exp(-b * q * q);
        return PauliVector{dh0, -2.0 * d * q * c * std::exp(-d * q * q), 0.0, -dh0};
      };
    case TullyVariant::III:
    default:
      return [=](double q) {
        const double dh1 = q > 0.0 ? b * c * std::exp(-c * q) : b * c * std::exp(c * q);
        return PauliVector{0.0, dh1, 0.0, 0.0};
      };
  }
}

const char* tully_name(TullyVariant v) {
  switch (v) {
    case TullyVariant::I: return "tully1";
    case TullyVariant::II: return "tully2";
    case TullyVariant::III:
    default: return "tully3";
  }
}

}  // namespace

HybridHamiltonian make_tully(TullyVariant variant) {
  return make_tully(TullyParams::defaults(variant));
}

HybridHamiltonian make_tully(const TullyParams& t) {
  const double m = t.mass;
  return HybridHamiltonian(
      tully_name(t.variant), m, [m](double, double p) { return p * p / (2.0 * m); },
      [](double, double) { return 0.0; }, [m](double, double p) { return p / m; },
      tully_value(t), tully_derivative(t), true);
}

HybridHamiltonian make_rabi(RabiRegime regime) { return make_rabi(RabiParams::defaults(regime)); }

HybridHamiltonian make_rabi(const RabiParams& r) {
  const double m = r.mass, w2 = r.omega * r.omega, g = r.gamma, c0 = r.c0;
  return HybridHamiltonian(
      r.name, m, [=](double q, double p) { return 0.5 * (p * p / m + m * w2 * q * q); },
      [=](double q, double) { return m * w2 * q; }, [=](double, double p) { return p / m; },
      [=](double q) { return PauliVector{0.0, c0, 0.0, g * q}; },
      [=](double) { return PauliVector{0.0, 0.0, 0.0, g}; }, true);
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"tully1", "tully2", "tully3", "rabi_us",
                                                 "rabi_ds"};
  return names;
}

HybridHamiltonian make_named_model(std::string_view name,
                                   const std::map<std::string, double>& overrides) {
  auto apply = [&](const std::map<std::string, double*>& slots) {
    for (const auto& [key, value] : overrides) {
      auto it = slots.find(key);
      if (it == slots.end())
        throw ConfigError("unknown parameter '" + key + "' for model " + std::string(name));
      *it->second = value;
    }
  };

  if (name == "tully1" || name == "tully2" || name == "tully3") {
    const TullyVariant v = name == "tully1"   ? TullyVariant::I
                           : name == "tully2" ? TullyVariant::II
                                              : TullyVariant::III;
    TullyParams t = TullyParams::defaults(v);
    apply({{"a", &t.a}, {"b", &t.b}, {"c", &t.c}, {"d", &t.d}, {"e0", &t.e0}, {"mass", &t.mass}});
    return make_tully(t);
  }
  if (name == "rabi_us" || name == "rabi_ds") {
    RabiParams r = RabiParams::defaults(name == "rabi_us" ? RabiRegime::ultrastrong
                                                          : RabiRegime::deep_strong);
    apply({{"gamma", &r.gamma}, {"c0", &r.c0}, {"mass", &r.mass}, {"omega", &r.omega}});
    return make_rabi(r);
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

SpectralData spectral(const PauliVector& h) {
  SpectralData s;
  const double r = h.norm_vec();
  s.lambda1 = h.h0 - r;
  s.lambda2 = h.h0 + r;
  if (r == 0.0) {
    s.degenerate = true;
    s.v1 = {cplx{0.0}, cplx{1.0}};
    s.v2 = {cplx{1.0}, cplx{0.0}};
    return s;
  }
  const double rho = std::hypot(h.h1, h.h2);
  const double theta = std::atan2(rho, h.h3);
  const double phi = rho > 0.0 ? std::atan2(h.h2, h.h1) : 0.0;
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
  const cplx eip = std::polar(1.0, phi);
  s.v1 = {-std::conj(eip) * sn, cplx{c}};
  s.v2 = {cplx{c}, eip * sn};
  return s;
}

SpectralData spectral(const HybridHamiltonian& h, double q) { return spectral(h.electronic(q)); }

double nac(const HybridHamiltonian& h, double q) {
  const SpectralData s = spectral(h, q);
  const double gap = s.lambda2 - s.lambda1;
  if (s.degenerate || gap < 1e-14)
    throw DegeneratePesError("nonadiabatic coupling undefined at degenerate point q=" +
                             std::to_string(q));
  const Mat2 dh = to_matrix(h.electronic_dq(q));
  // <v1| dH v2>
  cplx acc{0.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += std::conj(s.v1[i]) * dh(i, j) * s.v2[j];
  // <v1|d v2> = <v1|dH|v2> / (lambda2 - lambda1); the gauge makes it real.
  return acc.real() / gap;
}

}  // namespace koopmon
