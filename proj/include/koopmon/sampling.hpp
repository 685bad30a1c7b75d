#pragma once

// Quasi-random ensemble initialization from the Gaussian Wigner function of
// the initial wavepacket.

#include <array>
#include <cstddef>
#include <vector>

#include "koopmon/ensemble.hpp"

namespace koopmon {

struct InitSpec {
  double mu_q = 0.0;
  double mu_p = 0.0;
  double sigma_q = 1.0;
  DensityMatrix2 rho0 = projector({cplx{1.0}, cplx{0.0}});
  std::size_t n = 1;
  std::size_t sobol_skip = 1;

  /// Minimum-uncertainty partner width.
  double sigma_p() const { return 1.0 / (2.0 * sigma_q); }
};

/// Points of the unscrambled 2D Sobol sequence (Joe-Kuo direction numbers)
/// starting at index `skip`; index 0 is the origin.
std::vector<std::array<double, 2>> sobol_2d(std::size_t n, std::size_t skip = 1);

/// Standard normal quantile.
double inverse_normal_cdf(double u);
double normal_cdf(double x);

/// q ~ N(mu_q, sigma_q^2), p ~ N(mu_p, sigma_p^2) through the inverse CDF of
/// Sobol pairs; equal weights and density matrices.
ParticleEnsemble init_ensemble(const InitSpec& spec);

/// sigma_q = 20 / (sqrt(2) mu_p), the width convention of the Tully runs.
double sigma_q_from_momentum(double mu_p);

}  // namespace koopmon
