#include <doctest.h>

#include <numbers>
#include <sstream>

#include "koopmon/diagnostics.hpp"
#include "koopmon/errors.hpp"
#include "koopmon/sampling.hpp"
#include "koopmon/soft.hpp"
#include "test_util.hpp"

using namespace koopmon;

namespace {

const std::array<cplx, 2> kE1 = {cplx{1.0}, cplx{0.0}};

double mean_position(const WavepacketState& s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j)
    acc += s.grid.node(j) * (std::norm(s.psi1[j]) + std::norm(s.psi2[j]));
  return acc * s.grid.dr();
}

/// <p> by a direct (slow) discrete Fourier transform.
double mean_momentum(const WavepacketState& s) {
  const std::size_t n = s.grid.n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = s.grid.k(k);
    for (const auto* psi : {&s.psi1, &s.psi2}) {
      cplx c{};
      for (std::size_t j = 0; j < n; ++j)
        c += (*psi)[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j % n) / double(n));
      num += kk * std::norm(c);
      den += std::norm(c);
    }
  }
  return num / den;
}

HybridHamiltonian free_spin(double c0) {
  return HybridHamiltonian(
      "spin", 1.0, [](double, double p) { return 0.5 * p * p; },
      [](double, double) { return 0.0; }, [](double, double p) { return p; },
      [c0](double) { return PauliVector{0, c0, 0, 0}; }, [](double) { return PauliVector{}; },
      true);
}

HybridHamiltonian harmonic() { return make_rabi(RabiParams{0.0, 0.0, 1.0, 1.0, "harmonic"}); }

}  // namespace

TEST_CASE("spatial grid layout") {
  const SpatialGrid1D g{-30.0, 40.0, 4096};
  const double dk = g.k(1) - g.k(0);
  CHECK(dk * g.dr() * g.n == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
  CHECK(g.k(g.n / 2) == doctest::Approx(-std::numbers::pi / g.dr()));
  CHECK_THROWS_AS((SpatialGrid1D{0.0, 1.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((SpatialGrid1D{1.0, 0.0, 64}.validate()), ConfigError);
}

TEST_CASE("initial wavepacket: norm and moments") {
  const SpatialGrid1D g{-20.0, 20.0, 1024};
  const WavepacketState s = init_wavepacket(g, -3.0, 5.0, std::sqrt(2.0), kE1);
  CHECK(std::abs(norm(s) - 1.0) < 1e-12);
  CHECK(std::abs(mean_position(s) + 3.0) < 1e-8);
  CHECK(std::abs(mean_momentum(s) - 5.0) < 1e-8);
  CHECK(boundary_mass(s, 2.0) < 1e-12);
}

TEST_CASE("split-operator step is unitary and has an exact energy for a constant spin") {
  const auto h = make_tully(TullyVariant::I);
  const SpatialGrid1D g{-30.0, 40.0, 4096};
  const SoftPropagator prop(g, h, 1.0);
  WavepacketState s = init_wavepacket(g, -8.0, 10.0, std::sqrt(2.0), kE1);
  const double e0 = prop.energy(s);
  CHECK(e0 == doctest::Approx(0.025 - 0.01 + 1.0 / (8.0 * 2000.0 * 2.0)).epsilon(1e-4));
  for (int k = 0; k < 50; ++k) {
    const double n0 = norm(s);
    prop.step(s);
    CHECK(std::abs(norm(s) - n0) < 1e-12);
  }
  const SoftObservables o = observables(s, h, prop);
  CHECK(std::abs(o.P1 + o.P2 - 1.0) < 1e-10);
  CHECK(std::abs(o.energy - e0) < 1e-6 * std::abs(e0));

  const HybridHamiltonian mom(
      "momentum-coupled", 1.0, [](double q, double p) { return 0.5 * p * p + q * p; },
      [](double, double p) { return p; }, [](double q, double p) { return p + q; },
      [](double) { return PauliVector{}; }, [](double) { return PauliVector{}; }, false);
  CHECK_THROWS_AS(SoftPropagator(g, mom, 0.1), SolverError);
}

TEST_CASE("Tully I start: ground-state populations and purity") {
  const auto h = make_tully(TullyVariant::I);
  const SpatialGrid1D g{-30.0, 40.0, 4096};
  const SoftPropagator prop(g, h, 1.0);
  const WavepacketState s = init_wavepacket(g, -8.0, 10.0, std::sqrt(2.0), kE1);
  const SoftObservables o = observables(s, h, prop);
  // the packet tail reaches the crossing region with density ~ e^{-16}
  CHECK(std::abs(o.P1 - 1.0) < 1e-6);
  CHECK(std::abs(o.purity - 1.0) < 1e-12);
  CHECK(std::abs(o.norm - 1.0) < 1e-12);
}

TEST_CASE("harmonic coherent state returns after one period") {
  const SpatialGrid1D g{-15.0, 15.0, 2048};
  const double period = 2.0 * std::numbers::pi;
  auto run = [&](int steps) {
    const SoftPropagator prop(g, harmonic(), period / steps);
    WavepacketState s = init_wavepacket(g, 0.0, 4.0, 1.0 / std::sqrt(2.0), kE1);
    for (int k = 0; k < steps; ++k) prop.step(s);
    return std::hypot(mean_position(s), mean_momentum(s) - 4.0);
  };
  // dt close to the 0.01 used by the Rabi presets, with a whole number of
  // steps per period
  const double err = run(628);
  MESSAGE("coherent-state return error " << err);
  CHECK(err < 1e-3);
}

TEST_CASE("Strang splitting converges at second order") {
  // Anharmonic potential so that the splitting error is visible.
  const HybridHamiltonian h(
      "quartic", 1.0, [](double q, double p) { return 0.5 * p * p + 0.5 * q * q + 0.1 * q * q * q * q; },
      [](double q, double) { return q + 0.4 * q * q * q; }, [](double, double p) { return p; },
      [](double q) { return PauliVector{0, 0.3, 0, 0.2 * q}; },
      [](double) { return PauliVector{0, 0, 0, 0.2}; }, true);
  const SpatialGrid1D g{-12.0, 12.0, 512};
  auto final_state = [&](double dt, int steps) {
    const SoftPropagator prop(g, h, dt);
    WavepacketState s = init_wavepacket(g, 1.0, 0.5, 0.7, kE1);
    for (int k = 0; k < steps; ++k) prop.step(s);
    return s;
  };
  const WavepacketState ref = final_state(0.0025, 800);
  auto err = [&](const WavepacketState& s) {
    double e = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      e += std::norm(s.psi1[j] - ref.psi1[j]) + std::norm(s.psi2[j] - ref.psi2[j]);
    return std::sqrt(e * g.dr());
  };
  const double e1 = err(final_state(0.04, 50));
  const double e2 = err(final_state(0.02, 100));
  MESSAGE("Strang errors " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("two-level Rabi oscillation period") {
  const double c0 = 0.35;
  const SpatialGrid1D g{-15.0, 15.0, 512};
  const auto h = free_spin(c0);
  const SoftPropagator prop(g, h, 0.01);
  WavepacketState s = init_wavepacket(g, 0.0, 0.0, 1.0, kE1);
  // rho11 = cos^2(c0 t); locate its first minimum.
  std::vector<double> r11;
  for (int k = 0; k <= 600; ++k) {
    const SoftObservables o = observables(s, h, prop);
    const double t = 0.01 * k;
    r11.push_back(o.density(0, 0).real());
    CHECK(std::abs(r11.back() - std::pow(std::cos(c0 * t), 2)) < 1e-10);
    prop.step(s);
  }
  std::size_t m = 1;
  while (!(r11[m] <= r11[m - 1] && r11[m] <= r11[m + 1])) ++m;
  // parabola through the three samples around the minimum
  const double y0 = r11[m - 1], y1 = r11[m], y2 = r11[m + 1];
  const double t_min = 0.01 * (static_cast<double>(m) + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2));
  const double period = 2.0 * t_min;
  CHECK(std::abs(period / (std::numbers::pi / c0) - 1.0) < 1e-3);
}

TEST_CASE("Wigner function of a Gaussian") {
  const SpatialGrid1D g{-10.0, 10.0, 512};
  const double mq = 0.7, mp = -1.5, sq = 0.8;
  const double gamma = 1.0 / (2.0 * sq * sq);
  const WavepacketState s = init_wavepacket(g, mq, mp, sq, {cplx{0.6}, cplx{0.0, 0.8}});
  const DensityField w = wigner(s);
  REQUIRE(w.x.count == g.n);
  REQUIRE(w.y.count == g.n);
  double worst = 0.0, marg = 0.0;
  for (std::size_t i = 0; i < w.x.count; ++i) {
    const double q = w.x.node(i);
    double row = 0.0;
    for (std::size_t k = 0; k < w.y.count; ++k) {
      const double p = w.y.node(k);
      const double exact =
          std::exp(-gamma * (q - mq) * (q - mq) - (p - mp) * (p - mp) / gamma) / std::numbers::pi;
      worst = std::max(worst, std::abs(w.at(i, k) - exact));
      row += w.at(i, k) * w.y.step;
    }
    marg = std::max(marg, std::abs(row - (std::norm(s.psi1[i]) + std::norm(s.psi2[i]))));
  }
  CHECK(worst < 1e-6);
  CHECK(marg < 1e-6);
  CHECK(std::abs(w.integral() - 1.0) < 1e-6);

  const DensityField win = wigner_window(s, -2.0, 3.0, -4.0, 1.0, 64);
  CHECK(win.x.count <= 64);
  CHECK(win.y.count <= 64);
  for (std::size_t i = 0; i < win.x.count; ++i)
    for (std::size_t k = 0; k < win.y.count; ++k) {
      const double q = win.x.node(i), p = win.y.node(k);
      const double exact =
          std::exp(-gamma * (q - mq) * (q - mq) - (p - mp) * (p - mp) / gamma) / std::numbers::pi;
      CHECK(std::abs(win.at(i, k) - exact) < 1e-6);
    }
}

TEST_CASE("Wigner of an evolved state stays normalized") {
  const auto h = make_rabi(RabiRegime::ultrastrong);
  const SpatialGrid1D g{-15.0, 15.0, 1024};
  const SoftPropagator prop(g, h, 0.01);
  WavepacketState s = init_wavepacket(g, 0.0, 4.0, 1.0 / std::sqrt(2.0),
                                      {cplx{1 / std::sqrt(2.0)}, cplx{1 / std::sqrt(2.0)}});
  for (int k = 0; k < 300; ++k) prop.step(s);
  CHECK(std::abs(wigner(s, 4).integral() - 1.0) < 1e-6);
}

TEST_CASE("particle diagnostics") {
  const auto t1 = make_tully(TullyVariant::I);
  ParticleEnsemble e =
      ParticleEnsemble::uniform({-8.0, -7.0}, {10.0, 10.0}, projector({cplx{1.0}, cplx{0.0}}));
  DiagnosticsRecord r = particle_diagnostics(e, t1);
  CHECK(r.P1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.purity == doctest::Approx(1.0));
  CHECK(r.bloch.z == doctest::Approx(1.0));
  CHECK(r.bloch.x == doctest::Approx(0.0));

  const double s = 1 / std::sqrt(2.0);
  e.rho[0] = e.rho[1] = projector({cplx{s}, cplx{s}});
  r = particle_diagnostics(e, make_rabi(RabiRegime::ultrastrong));
  CHECK(r.bloch.x == doctest::Approx(1.0));
  CHECK(r.bloch.y == doctest::Approx(0.0));
  CHECK(r.purity == doctest::Approx(1.0));

  e.rho[0] = projector({cplx{1.0}, cplx{0.0}});
  e.rho[1] = projector({cplx{0.0}, cplx{1.0}});
  r = particle_diagnostics(e, t1);
  CHECK(r.purity == doctest::Approx(0.5));
  CHECK(norm(r.bloch) < 1e-15);

  const ParticleEnsemble f = koopmon::testing::tully_four();
  r = particle_diagnostics(f, t1);
  CHECK(std::abs(r.P1 + r.P2 - 1.0) < 1e-10);
  const DensityMatrix2 agg = aggregate_density(f);
  CHECK(std::abs(purity(agg) - purity_from_bloch(bloch_vector(agg))) < 1e-12);
  CHECK(std::abs(r.purity - purity(agg)) < 1e-12);
}

TEST_CASE("smoothed cloud and waterfall densities") {
  const double delta = 0.25, sig = delta / std::sqrt(2.0);
  ParticleEnsemble one = ParticleEnsemble::uniform({0.3}, {-0.2}, Mat2::identity() * 0.5);
  const GridAxis ax{-3.0, 0.02, 301};
  const DensityField d = smoothed_cloud(one, delta, ax, ax);
  CHECK(std::abs(d.integral() - 1.0) < 1e-6);
  const double peak = 1.0 / (2 * std::numbers::pi * sig * sig);
  // node (0.3, -0.2) is (165, 140)
  CHECK(d.at(165, 140) == doctest::Approx(peak).epsilon(1e-10));
  for (double v : d.values) CHECK(v >= 0.0);

  ParticleEnsemble pair = ParticleEnsemble::uniform({-1.0, 1.0}, {0.5, -0.5}, Mat2::identity() * 0.5);
  const GridAxis sym{-3.0, 0.05, 121};
  const DensityField ds = smoothed_cloud(pair, delta, sym, sym);
  for (std::size_t i = 0; i < sym.count; ++i)
    for (std::size_t j = 0; j < sym.count; ++j)
      CHECK(ds.at(i, j) == doctest::Approx(ds.at(sym.count - 1 - i, sym.count - 1 - j)));

  InitSpec spec;
  spec.mu_q = 0.0;
  spec.mu_p = 4.0;
  spec.sigma_q = 1.0 / std::sqrt(2.0);
  spec.n = 2000;
  const ParticleEnsemble e = init_ensemble(spec);
  const GridAxis r{-5.0, 0.01, 1001};
  const DensityField wf = waterfall_slice(e, delta, r);
  CHECK(std::abs(wf.integral() - 1.0) < 1e-6);
  const double var = spec.sigma_q * spec.sigma_q + delta * delta / 2.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.count; ++i) {
    const double x = r.node(i);
    worst = std::max(worst, std::abs(wf.values[i] - std::exp(-x * x / (2 * var)) /
                                                        std::sqrt(2 * std::numbers::pi * var)));
  }
  MESSAGE("waterfall vs convolved Gaussian: " << worst);
  CHECK(worst < 5e-3);

  const SpatialGrid1D g{-15.0, 15.0, 2048};
  const WavepacketState s = init_wavepacket(g, 0.0, 4.0, spec.sigma_q, kE1);
  const DensityField sw = waterfall_slice(s);
  const double gamma = 1.0 / (2 * spec.sigma_q * spec.sigma_q);
  CHECK(*std::max_element(sw.values.begin(), sw.values.end()) ==
        doctest::Approx(std::sqrt(gamma / std::numbers::pi)).epsilon(1e-10));
  CHECK(std::abs(sw.integral() - 1.0) < 1e-10);
}

TEST_CASE("text formats") {
  std::ostringstream ts;
  write_timeseries_header(ts);
  CHECK(ts.str() == "t\tP1\tP2\tpurity\tbx\tby\tbz\tenergy\tdrift\n");

  DensityField f;
  f.kind = "waterfall";
  f.delta = 0.25;
  f.x = {0.0, 0.5, 3};
  f.values = {1, 2, 3};
  std::ostringstream os;
  write_density_field(os, f);
  const std::string out = os.str();
  CHECK(out.find("# kind waterfall") != std::string::npos);
  CHECK(out.find("# delta 0.25") != std::string::npos);

  const SpatialGrid1D g{-1.0, 1.0, 8};
  std::ostringstream wf;
  write_wavefunction(wf, init_wavepacket(g, 0.0, 0.0, 0.3, kE1));
  std::istringstream in(wf.str());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
}
