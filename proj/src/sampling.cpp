#include "koopmon/sampling.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

#include <cmath>
#include <limits>

#include "koopmon/errors.hpp"

namespace koopmon {

std::vector<std::array<double, 2>> sobol_2d(std::size_t n, std::size_t skip) {
  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  // boost's engine starts at index 1 (it never emits the origin).
  boost::random::sobol engine(2);
  std::size_t index = skip;
  if (index == 0 && n > 0) {
    out.push_back({0.0, 0.0});
    index = 1;
  }
  engine.discard(2 * static_cast<std::uintmax_t>(index - 1));
  constexpr double scale = 0x1p-64;
  while (out.size() < n) {
    const double x = static_cast<double>(engine()) * scale;
    const double y = static_cast<double>(engine()) * scale;
    out.push_back({x, y});
  }
  return out;
}

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw SolverError("normal quantile needs u in [0, 1]");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

double normal_cdf(double x) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

ParticleEnsemble init_ensemble(const InitSpec& spec) {
  if (spec.n == 0) throw ConfigError("ensemble needs at least one particle");
  if (!(spec.sigma_q > 0.0)) throw ConfigError("sigma_q must be positive");
  if (spec.sobol_skip == 0 && spec.n > 0)
    throw ConfigError("sobol_skip = 0 maps the origin to -infinity");
  const auto pts = sobol_2d(spec.n, spec.sobol_skip);
  std::vector<double> q(spec.n), p(spec.n);
  for (std::size_t a = 0; a < spec.n; ++a) {
    q[a] = spec.mu_q + spec.sigma_q * inverse_normal_cdf(pts[a][0]);
    p[a] = spec.mu_p + spec.sigma_p() * inverse_normal_cdf(pts[a][1]);
  }
  return ParticleEnsemble::uniform(std::move(q), std::move(p), spec.rho0);
}

double sigma_q_from_momentum(double mu_p) {
  if (mu_p == 0.0) throw ConfigError("sigma_q_from_momentum needs a nonzero mu_p");
  return 20.0 / (std::sqrt(2.0) * std::abs(mu_p));
}

}  // namespace koopmon
