#pragma once

// Gaussian regularization kernel, the adaptive truncation box and the
// composite trapezoid rule used for all coupling integrals.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "koopmon/pauli.hpp"

namespace koopmon {

struct KernelSpec {
  double alpha = 0.5;

  /// Standard deviation of the 1D kernel, alpha / sqrt(2).
  double sigma() const { return alpha / std::numbers::sqrt2; }

  /// Distance beyond which the kernel is treated as zero (relative size
  /// exp(-42) ~ 6e-19 of its peak).
  double cutoff() const { return 6.5 * alpha; }
};

/// exp(-y^2/alpha^2) / (alpha sqrt(pi))
inline double kernel_1d(const KernelSpec& k, double y) {
  const double u = y / k.alpha;
  return std::exp(-u * u) / (k.alpha * std::sqrt(std::numbers::pi));
}
inline double kernel_1d_deriv(const KernelSpec& k, double y) {
  return -2.0 * y / (k.alpha * k.alpha) * kernel_1d(k, y);
}
inline double kernel_1d_deriv2(const KernelSpec& k, double y) {
  const double a2 = k.alpha * k.alpha;
  return (4.0 * y * y / (a2 * a2) - 2.0 / a2) * kernel_1d(k, y);
}

/// Kernel value with its first two derivatives at one offset.
struct KernelJet {
  double k, d1, d2;
};
inline KernelJet kernel_jet(const KernelSpec& spec, double y) {
  const double a2 = spec.alpha * spec.alpha;
  const double k = kernel_1d(spec, y);
  return {k, -2.0 * y / a2 * k, (4.0 * y * y / (a2 * a2) - 2.0 / a2) * k};
}

/// Uniform axis min + i*step, i = 0..count-1 with trapezoid weights, or
/// uniform weights when the nodes are cell midpoints.
struct GridAxis {
  double min = 0.0;
  double step = 1.0;
  std::size_t count = 1;
  bool midpoint = false;

  double node(std::size_t i) const { return min + static_cast<double>(i) * step; }
  double max() const { return node(count - 1); }
  double weight(std::size_t i) const {
    if (midpoint || count == 1) return step;
    return (i == 0 || i + 1 == count) ? 0.5 * step : step;
  }
  /// Half-open index range of nodes within [c - r, c + r].
  std::pair<std::size_t, std::size_t> window(double c, double r) const;
};

struct GridParams {
  int n_q = 2;
  int n_p = 2;
  int j_q = 2;
  int j_p = 2;
};

/// Axis covering [min(x) - n sigma, max(x) + n sigma] with spacing sigma/j.
/// The upper end is extended to the next node when the extent is not a
/// multiple of the spacing.
GridAxis build_axis(std::span<const double> centers, double sigma, int n_pad, int j_refine);

/// Same box and spacing, nodes at the cell midpoints.
GridAxis build_midpoint_axis(std::span<const double> centers, double sigma, int n_pad,
                             int j_refine);

struct QuadratureGrid {
  GridAxis q;
  GridAxis p;

  std::size_t size() const { return q.count * p.count; }
  /// Row-major in (q index, p index).
  std::size_t index(std::size_t i, std::size_t j) const { return i * p.count + j; }
};

struct ParticleEnsemble;

QuadratureGrid build_grid(std::span<const double> q, std::span<const double> p,
                          const KernelSpec& spec, const GridParams& params);
QuadratureGrid build_grid(const ParticleEnsemble& e, const KernelSpec& spec,
                          const GridParams& params);

/// Throws GridCoverageError if any point lies outside the box.
void check_coverage(const QuadratureGrid& g, std::span<const double> q, std::span<const double> p);
void check_coverage(const GridAxis& axis, std::span<const double> x);

double trapezoid_1d(std::span<const double> values, const GridAxis& axis);
double trapezoid_2d(std::span<const double> values, const QuadratureGrid& grid);
PauliVector trapezoid_2d(std::span<const PauliVector> values, const QuadratureGrid& grid);

}  // namespace koopmon
