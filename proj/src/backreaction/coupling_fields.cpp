// Field route: pair sums collapse into a few kernel-weighted fields.
//
// Koopmon (the interaction only depends on q, so only the Pauli-vector part
// of dH/dq survives the commutator):
//   S = sum w K,  A = sum w K r,  B = sum w dK/dp r
//   E = int 2 (A x B) . h'(q) / S
// Bohmion:
//   S = sum w K,  d = sum w K',  D = sum w K' (r0, r)
//   E = 1/(8M) int (4 |D|^2 - d^2) / S
//
// Each grid row is owned by one thread and sums particles in index order;
// per-particle gradients are likewise owned by one thread, so results do not
// depend on the thread count.

#include <cmath>
#include <cstddef>

#include "koopmon/backreaction.hpp"
#include "patches.hpp"

namespace koopmon {

using detail::AxisPatch;
using detail::kDenominatorFloor;

namespace {

/// For each node of an axis, the particles whose patch covers it (ascending).
std::vector<std::vector<std::size_t>> covering_lists(const std::vector<AxisPatch>& patches,
                                                     std::size_t count) {
  std::vector<std::vector<std::size_t>> rows(count);
  for (std::size_t c = 0; c < patches.size(); ++c)
    for (std::size_t i = patches[c].lo; i < patches[c].hi; ++i) rows[i].push_back(c);
  return rows;
}

double ordered_sum(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

}  // namespace

CouplingGradient koopmon_coupling(const ParticleEnsemble& e, const HybridHamiltonian& h,
                                  const QuadratureGrid& g, const KernelSpec& spec,
                                  bool with_gradient) {
  check_coverage(g, e.q, e.p);
  const std::size_t n = e.size();
  const auto pq = detail::make_patches(g.q, e.q, spec);
  const auto pp = detail::make_patches(g.p, e.p, spec);
  const auto rows = covering_lists(pq, g.q.count);

  std::vector<Vec3> r(n);
  for (std::size_t c = 0; c < n; ++c) r[c] = vector_part(to_pauli(e.rho[c]));

  const std::size_t nodes = g.size();
  // Derivatives of the weighted energy density with respect to each field.
  std::vector<double> phi_s(nodes, 0.0);
  std::vector<Vec3> phi_a(nodes), phi_b(nodes);
  std::vector<double> row_energy(g.q.count, 0.0);

#pragma omp parallel
  {
    std::vector<double> s(g.p.count);
    std::vector<Vec3> a(g.p.count), b(g.p.count);
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(g.q.count); ++ii) {
      const std::size_t i = static_cast<std::size_t>(ii);
      if (rows[i].empty()) continue;
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(a.begin(), a.end(), Vec3{});
      std::fill(b.begin(), b.end(), Vec3{});
      for (std::size_t c : rows[i]) {
        const double kq = e.w[c] * pq[c].k[i - pq[c].lo];
        for (std::size_t j = pp[c].lo; j < pp[c].hi; ++j) {
          const double kv = kq * pp[c].k[j - pp[c].lo];
          const double dp = kq * pp[c].d1[j - pp[c].lo];
          s[j] += kv;
          a[j] += r[c] * kv;
          b[j] += r[c] * dp;
        }
      }
      const Vec3 dh = vector_part(h.electronic_dq(g.q.node(i)));
      double acc = 0.0;
      for (std::size_t j = 0; j < g.p.count; ++j) {
        if (s[j] < kDenominatorFloor) continue;
        const double wt = g.q.weight(i) * g.p.weight(j);
        const double inv = 2.0 * wt / s[j];
        const double phi = inv * dot(cross(a[j], b[j]), dh);
        acc += phi;
        const std::size_t node = g.index(i, j);
        phi_s[node] = -phi / s[j];
        phi_a[node] = cross(b[j], dh) * inv;
        phi_b[node] = cross(dh, a[j]) * inv;
      }
      row_energy[i] = acc;
    }
  }

  CouplingGradient out;
  out.energy = ordered_sum(row_energy);
  if (!with_gradient) return out;

  out.dq.assign(n, 0.0);
  out.dp.assign(n, 0.0);
  out.drho.assign(n, PauliVector{});
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(n); ++cc) {
    const std::size_t c = static_cast<std::size_t>(cc);
    const AxisPatch& xq = pq[c];
    const AxisPatch& xp = pp[c];
    Vec3 dr;
    double gq = 0.0, gp = 0.0;
    for (std::size_t i = xq.lo; i < xq.hi; ++i) {
      const double kq = xq.k[i - xq.lo], dq = xq.d1[i - xq.lo];
      for (std::size_t j = xp.lo; j < xp.hi; ++j) {
        const std::size_t node = g.index(i, j);
        const double kp = xp.k[j - xp.lo], dp = xp.d1[j - xp.lo], ddp = xp.d2[j - xp.lo];
        const double sa = phi_s[node] + dot(phi_a[node], r[c]);
        const double sb = dot(phi_b[node], r[c]);
        dr += phi_a[node] * (kq * kp) + phi_b[node] * (kq * dp);
        gq -= dq * kp * sa + dq * dp * sb;
        gp -= kq * dp * sa + kq * ddp * sb;
      }
    }
    out.dq[c] = e.w[c] * gq;
    out.dp[c] = e.w[c] * gp;
    out.drho[c] = from_vector(0.0, dr * (0.5 * e.w[c]));
  }
  return out;
}

CouplingGradient bohmion_coupling(const ParticleEnsemble& e, double mass, const GridAxis& axis,
                                  const KernelSpec& spec, bool with_gradient) {
  check_coverage(axis, e.q);
  const std::size_t n = e.size();
  const auto pq = detail::make_patches(axis, e.q, spec);
  const auto rows = covering_lists(pq, axis.count);
  const double scale = 1.0 / (8.0 * mass);

  std::vector<PauliVector> r(n);
  for (std::size_t c = 0; c < n; ++c) r[c] = to_pauli(e.rho[c]);

  std::vector<double> s(axis.count, 0.0), d(axis.count, 0.0), psi(axis.count, 0.0);
  std::vector<PauliVector> big_d(axis.count);
  std::vector<double> node_energy(axis.count, 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(axis.count); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    for (std::size_t c : rows[i]) {
      const double kv = e.w[c] * pq[c].k[i - pq[c].lo];
      const double dv = e.w[c] * pq[c].d1[i - pq[c].lo];
      s[i] += kv;
      d[i] += dv;
      big_d[i] += r[c] * dv;
    }
    if (s[i] < kDenominatorFloor) continue;
    const PauliVector& dd = big_d[i];
    const double sq = dd.h0 * dd.h0 + dd.h1 * dd.h1 + dd.h2 * dd.h2 + dd.h3 * dd.h3;
    psi[i] = (4.0 * sq - d[i] * d[i]) / s[i];
    node_energy[i] = scale * axis.weight(i) * psi[i];
  }

  CouplingGradient out;
  out.energy = ordered_sum(node_energy);
  if (!with_gradient) return out;

  out.dq.assign(n, 0.0);
  out.dp.assign(n, 0.0);
  out.drho.assign(n, PauliVector{});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(n); ++cc) {
    const std::size_t c = static_cast<std::size_t>(cc);
    const AxisPatch& x = pq[c];
    PauliVector dr;
    double gq = 0.0;
    for (std::size_t i = x.lo; i < x.hi; ++i) {
      if (s[i] < kDenominatorFloor) continue;
      const double wt = axis.weight(i) / s[i];
      const double k1 = x.d1[i - x.lo], k2 = x.d2[i - x.lo];
      dr += big_d[i] * (8.0 * k1 * wt);
      const double proj = big_d[i].h0 * r[c].h0 + big_d[i].h1 * r[c].h1 +
                          big_d[i].h2 * r[c].h2 + big_d[i].h3 * r[c].h3;
      gq += wt * (psi[i] * k1 - (8.0 * proj - 2.0 * d[i]) * k2);
    }
    out.dq[c] = scale * e.w[c] * gq;
    out.drho[c] = dr * (0.5 * scale * e.w[c]);
  }
  return out;
}

}  // namespace koopmon
