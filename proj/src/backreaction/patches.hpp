#pragma once

// Kernel values on the grid nodes near one particle.

#include <algorithm>
#include <cstddef>
#include <tuple>
#include <span>
#include <vector>

#include "koopmon/regularization.hpp"

namespace koopmon::detail {

/// Kernel jet of one centre on the nodes [lo, hi) of an axis.
struct AxisPatch {
  std::size_t lo = 0, hi = 0;
  std::vector<double> k, d1, d2;

  bool covers(std::size_t i) const { return i >= lo && i < hi; }
  bool empty() const { return hi <= lo; }
};

inline AxisPatch make_patch(const GridAxis& axis, double center, const KernelSpec& spec) {
  AxisPatch patch;
  std::tie(patch.lo, patch.hi) = axis.window(center, spec.cutoff());
  const std::size_t n = patch.hi > patch.lo ? patch.hi - patch.lo : 0;
  patch.k.resize(n);
  patch.d1.resize(n);
  patch.d2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const KernelJet jet = kernel_jet(spec, axis.node(patch.lo + i) - center);
    patch.k[i] = jet.k;
    patch.d1[i] = jet.d1;
    patch.d2[i] = jet.d2;
  }
  return patch;
}

inline std::vector<AxisPatch> make_patches(const GridAxis& axis, std::span<const double> centers,
                                           const KernelSpec& spec) {
  std::vector<AxisPatch> out(centers.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(centers.size()); ++a)
    out[a] = make_patch(axis, centers[a], spec);
  return out;
}

/// Intersection of two patches as a half-open range.
inline std::pair<std::size_t, std::size_t> overlap(const AxisPatch& a, const AxisPatch& b) {
  const std::size_t lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  return {lo, std::max(lo, hi)};
}

/// Values below this are treated as an empty denominator.
inline constexpr double kDenominatorFloor = 1e-300;

}  // namespace koopmon::detail
