#include "koopmon/regularization.hpp"

#include <algorithm>
#include <sstream>

#include "koopmon/ensemble.hpp"
#include "koopmon/errors.hpp"

namespace koopmon {

std::pair<std::size_t, std::size_t> GridAxis::window(double c, double r) const {
  const double lo = std::ceil((c - r - min) / step);
  const double hi = std::floor((c + r - min) / step);
  const double last = static_cast<double>(count) - 1.0;
  const double first = std::clamp(lo, 0.0, last + 1.0);
  const double end = std::clamp(hi + 1.0, 0.0, last + 1.0);
  if (end <= first) return {0, 0};
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(end)};
}

GridAxis build_axis(std::span<const double> centers, double sigma, int n_pad, int j_refine) {
  if (centers.empty()) throw SolverError("cannot build a grid for an empty ensemble");
  const auto [lo_it, hi_it] = std::minmax_element(centers.begin(), centers.end());
  GridAxis axis;
  axis.step = sigma / j_refine;
  axis.min = *lo_it - n_pad * sigma;
  const double extent = (*hi_it + n_pad * sigma) - axis.min;
  // guard against 8.0000000001 -> 9 intervals from rounding
  const double intervals = std::ceil(extent / axis.step - 1e-9);
  axis.count = static_cast<std::size_t>(std::max(intervals, 0.0)) + 1;
  return axis;
}

GridAxis build_midpoint_axis(std::span<const double> centers, double sigma, int n_pad,
                             int j_refine) {
  const GridAxis box = build_axis(centers, sigma, n_pad, j_refine);
  return {box.min + 0.5 * box.step, box.step, std::max<std::size_t>(box.count, 2) - 1, true};
}

QuadratureGrid build_grid(std::span<const double> q, std::span<const double> p,
                          const KernelSpec& spec, const GridParams& params) {
  const double s = spec.sigma();
  return {build_axis(q, s, params.n_q, params.j_q), build_axis(p, s, params.n_p, params.j_p)};
}

QuadratureGrid build_grid(const ParticleEnsemble& e, const KernelSpec& spec,
                          const GridParams& params) {
  return build_grid(e.q, e.p, spec, params);
}

void check_coverage(const GridAxis& axis, std::span<const double> x) {
  const double lo = axis.min, hi = axis.max();
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!(x[a] >= lo && x[a] <= hi)) {
      std::ostringstream msg;
      msg << "particle " << a << " at " << x[a] << " lies outside the quadrature box [" << lo
          << ", " << hi << "]";
      throw GridCoverageError(msg.str());
    }
  }
}

void check_coverage(const QuadratureGrid& g, std::span<const double> q,
                    std::span<const double> p) {
  check_coverage(g.q, q);
  check_coverage(g.p, p);
}

double trapezoid_1d(std::span<const double> values, const GridAxis& axis) {
  double acc = 0.0;
  for (std::size_t i = 0; i < axis.count; ++i) acc += axis.weight(i) * values[i];
  return acc;
}

double trapezoid_2d(std::span<const double> values, const QuadratureGrid& grid) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.q.count; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < grid.p.count; ++j) row += grid.p.weight(j) * values[grid.index(i, j)];
    acc += grid.q.weight(i) * row;
  }
  return acc;
}

PauliVector trapezoid_2d(std::span<const PauliVector> values, const QuadratureGrid& grid) {
  PauliVector acc;
  for (std::size_t i = 0; i < grid.q.count; ++i) {
    PauliVector row;
    for (std::size_t j = 0; j < grid.p.count; ++j)
      row += values[grid.index(i, j)] * grid.p.weight(j);
    acc += row * grid.q.weight(i);
  }
  return acc;
}

}  // namespace koopmon
