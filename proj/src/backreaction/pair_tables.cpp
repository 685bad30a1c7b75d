// Serial reference: one quadrature per particle pair.

#include <cmath>

#include "koopmon/backreaction.hpp"
#include "koopmon/errors.hpp"
#include "patches.hpp"

namespace koopmon {

using detail::AxisPatch;
using detail::kDenominatorFloor;

namespace {

std::vector<double> denominator_2d(const ParticleEnsemble& e, const QuadratureGrid& g,
                                   const std::vector<AxisPatch>& pq,
                                   const std::vector<AxisPatch>& pp) {
  std::vector<double> s(g.size(), 0.0);
  for (std::size_t c = 0; c < e.size(); ++c) {
    for (std::size_t i = pq[c].lo; i < pq[c].hi; ++i) {
      const double kq = e.w[c] * pq[c].k[i - pq[c].lo];
      for (std::size_t j = pp[c].lo; j < pp[c].hi; ++j)
        s[g.index(i, j)] += kq * pp[c].k[j - pp[c].lo];
    }
  }
  return s;
}

std::vector<double> denominator_1d(const ParticleEnsemble& e, const GridAxis& axis,
                                   const std::vector<AxisPatch>& pq) {
  std::vector<double> s(axis.count, 0.0);
  for (std::size_t c = 0; c < e.size(); ++c)
    for (std::size_t i = pq[c].lo; i < pq[c].hi; ++i) s[i] += e.w[c] * pq[c].k[i - pq[c].lo];
  return s;
}

}  // namespace

PairTable<PauliVector> koopmon_pairs(const ParticleEnsemble& e, const HybridHamiltonian& h,
                                     const QuadratureGrid& g, const KernelSpec& spec) {
  check_coverage(g, e.q, e.p);
  const std::size_t n = e.size();
  const auto pq = detail::make_patches(g.q, e.q, spec);
  const auto pp = detail::make_patches(g.p, e.p, spec);
  const std::vector<double> s = denominator_2d(e, g, pq, pp);

  // dH/dp is identity-proportional (momentum-free interaction).
  std::vector<double> dhp(g.size());
  std::vector<PauliVector> dhq(g.size());
  for (std::size_t i = 0; i < g.q.count; ++i) {
    const double q = g.q.node(i);
    const PauliVector el = h.electronic_dq(q);
    for (std::size_t j = 0; j < g.p.count; ++j) {
      const double p = g.p.node(j);
      dhp[g.index(i, j)] = h.classical_dp(q, p);
      PauliVector d = el;
      d.h0 += h.classical_dq(q, p);
      dhq[g.index(i, j)] = d;
    }
  }

  PairTable<PauliVector> table(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto [ilo, ihi] = detail::overlap(pq[a], pq[b]);
      const auto [jlo, jhi] = detail::overlap(pp[a], pp[b]);
      PauliVector acc;
      for (std::size_t i = ilo; i < ihi; ++i) {
        const double kqa = pq[a].k[i - pq[a].lo], dqa = pq[a].d1[i - pq[a].lo];
        const double kqb = pq[b].k[i - pq[b].lo], dqb = pq[b].d1[i - pq[b].lo];
        PauliVector row;
        for (std::size_t j = jlo; j < jhi; ++j) {
          const std::size_t node = g.index(i, j);
          if (s[node] < kDenominatorFloor) continue;
          const double kpa = pp[a].k[j - pp[a].lo], dpa = pp[a].d1[j - pp[a].lo];
          const double kpb = pp[b].k[j - pp[b].lo], dpb = pp[b].d1[j - pp[b].lo];
          const double ka = kqa * kpa, kb = kqb * kpb;
          // K_a {K_b, H} - K_b {K_a, H}
          const double cq = ka * (dqb * kpb) - kb * (dqa * kpa);
          const double cp = ka * (kqb * dpb) - kb * (kqa * dpa);
          PauliVector v = dhq[node] * (-cp);
          v.h0 += cq * dhp[node];
          row += v * (g.p.weight(j) / s[node]);
        }
        acc += row * g.q.weight(i);
      }
      table(a, b) = acc * 0.5;
      table(b, a) = acc * -0.5;
    }
  }
  return table;
}

PairTable<double> bohmion_pairs(const ParticleEnsemble& e, const GridAxis& axis,
                                const KernelSpec& spec) {
  check_coverage(axis, e.q);
  const std::size_t n = e.size();
  const auto pq = detail::make_patches(axis, e.q, spec);
  const std::vector<double> s = denominator_1d(e, axis, pq);

  PairTable<double> table(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto [ilo, ihi] = detail::overlap(pq[a], pq[b]);
      double acc = 0.0;
      for (std::size_t i = ilo; i < ihi; ++i) {
        if (s[i] < kDenominatorFloor) continue;
        acc += axis.weight(i) * pq[a].d1[i - pq[a].lo] * pq[b].d1[i - pq[b].lo] / s[i];
      }
      table(a, b) = acc;
      table(b, a) = acc;
    }
  }
  return table;
}

double koopmon_coupling_energy(const ParticleEnsemble& e, const PairTable<PauliVector>& table) {
  const std::size_t n = e.size();
  std::vector<Vec3> r(n);
  for (std::size_t a = 0; a < n; ++a) r[a] = vector_part(to_pauli(e.rho[a]));
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      // i[rho_a, rho_b] = -2 (r_a x r_b).sigma; Tr(X I) = 2 x.I
      const Vec3 x = cross(r[a], r[b]) * -2.0;
      row += e.w[b] * 2.0 * dot(x, vector_part(table(a, b)));
    }
    acc += e.w[a] * row;
  }
  return 0.5 * acc;
}

double bohmion_coupling_energy(const ParticleEnsemble& e, double mass,
                               const PairTable<double>& table) {
  const std::size_t n = e.size();
  std::vector<PauliVector> r(n);
  for (std::size_t a = 0; a < n; ++a) r[a] = to_pauli(e.rho[a]);
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < n; ++b)
      row += e.w[b] * (2.0 * trace_product(r[a], r[b]) - 1.0) * table(a, b);
    acc += e.w[a] * row;
  }
  return acc / (8.0 * mass);
}

}  // namespace koopmon
