// Two degrees of freedom: the 4D coupling integrals factor into products of
// per-axis integrals when H is a sum of products of single-axis terms.

#include <cmath>

#include "koopmon/backreaction.hpp"
#include "koopmon/errors.hpp"
#include "patches.hpp"

namespace koopmon {

using detail::AxisPatch;
using detail::kDenominatorFloor;

namespace {

bool complete(const AxisScalar& f) { return f.value && f.dq && f.dp; }
bool complete(const AxisOperator& f) { return f.value && f.dq && f.dp; }

/// Per-node samples of one axis' factors.
struct AxisFields {
  std::vector<double> s, h, hq, hp;
  std::vector<PauliVector> H, Hq, Hp;
};

AxisFields sample_axis(std::span<const double> w, const QuadratureGrid& g,
                       const std::vector<AxisPatch>& pq, const std::vector<AxisPatch>& pp,
                       const AxisScalar& h, const AxisOperator& H) {
  AxisFields f;
  const std::size_t nodes = g.size();
  f.s.assign(nodes, 0.0);
  for (std::size_t c = 0; c < w.size(); ++c)
    for (std::size_t i = pq[c].lo; i < pq[c].hi; ++i)
      for (std::size_t j = pp[c].lo; j < pp[c].hi; ++j)
        f.s[g.index(i, j)] += w[c] * pq[c].k[i - pq[c].lo] * pp[c].k[j - pp[c].lo];
  f.h.assign(nodes, 0.0);
  f.hq.assign(nodes, 0.0);
  f.hp.assign(nodes, 0.0);
  f.H.assign(nodes, PauliVector{});
  f.Hq.assign(nodes, PauliVector{});
  f.Hp.assign(nodes, PauliVector{});
  for (std::size_t i = 0; i < g.q.count; ++i) {
    const double q = g.q.node(i);
    for (std::size_t j = 0; j < g.p.count; ++j) {
      const double p = g.p.node(j);
      const std::size_t n = g.index(i, j);
      if (h) {
        f.h[n] = h.value(q, p);
        f.hq[n] = h.dq(q, p);
        f.hp[n] = h.dp(q, p);
      }
      if (H) {
        f.H[n] = H.value(q, p);
        f.Hq[n] = H.dq(q, p);
        f.Hp[n] = H.dp(q, p);
      }
    }
  }
  return f;
}

std::vector<double> axis_denominator(std::span<const double> w, const GridAxis& axis,
                                     const std::vector<AxisPatch>& patches) {
  std::vector<double> s(axis.count, 0.0);
  for (std::size_t c = 0; c < w.size(); ++c)
    for (std::size_t i = patches[c].lo; i < patches[c].hi; ++i)
      s[i] += w[c] * patches[c].k[i - patches[c].lo];
  return s;
}

Vec3 commutator_vector(const DensityMatrix2& a, const DensityMatrix2& b) {
  // i[a, b] = -2 (a x b) . sigma
  return cross(vector_part(to_pauli(a)), vector_part(to_pauli(b))) * -2.0;
}

}  // namespace

void FactorizedHamiltonian2D::validate() const {
  if (!classical || !classical_grad)
    throw DecompositionError("factorized Hamiltonian needs a classical part and its gradient");
  if (static_cast<bool>(h1) != static_cast<bool>(H2))
    throw DecompositionError("product term h1(z1) H2(z2) is only half specified");
  if (static_cast<bool>(h2) != static_cast<bool>(H1))
    throw DecompositionError("product term h2(z2) H1(z1) is only half specified");
  if ((h1 && (!complete(h1) || !complete(H2))) || (h2 && (!complete(h2) || !complete(H1))))
    throw DecompositionError("product factors need values and both phase-space derivatives");
}

PauliVector FactorizedHamiltonian2D::operator()(double q1, double p1, double q2,
                                                double p2) const {
  PauliVector out = quantum;
  out.h0 += classical(q1, p1, q2, p2);
  if (h1) out += H2.value(q2, p2) * h1.value(q1, p1);
  if (h2) out += H1.value(q1, p1) * h2.value(q2, p2);
  return out;
}

std::array<PauliVector, 4> FactorizedHamiltonian2D::gradient(double q1, double p1, double q2,
                                                             double p2) const {
  const auto cg = classical_grad(q1, p1, q2, p2);
  std::array<PauliVector, 4> out;
  for (int k = 0; k < 4; ++k) out[k].h0 = cg[k];
  if (h1) {
    const double v = h1.value(q1, p1);
    const PauliVector H = H2.value(q2, p2);
    out[0] += H * h1.dq(q1, p1);
    out[1] += H * h1.dp(q1, p1);
    out[2] += H2.dq(q2, p2) * v;
    out[3] += H2.dp(q2, p2) * v;
  }
  if (h2) {
    const double v = h2.value(q2, p2);
    const PauliVector H = H1.value(q1, p1);
    out[0] += H1.dq(q1, p1) * v;
    out[1] += H1.dp(q1, p1) * v;
    out[2] += H * h2.dq(q2, p2);
    out[3] += H * h2.dp(q2, p2);
  }
  return out;
}

AxisTables axis_tables(std::span<const double> q, std::span<const double> p,
                       std::span<const double> w, const QuadratureGrid& g, const KernelSpec& spec,
                       const AxisScalar& h, const AxisOperator& H) {
  check_coverage(g, q, p);
  const std::size_t n = q.size();
  const auto pq = detail::make_patches(g.q, q, spec);
  const auto pp = detail::make_patches(g.p, p, spec);
  const AxisFields f = sample_axis(w, g, pq, pp, h, H);

  AxisTables t{PairTable<double>(n), PairTable<double>(n), PairTable<PauliVector>(n),
               PairTable<PauliVector>(n)};
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      const auto [ilo, ihi] = detail::overlap(pq[s], pq[s2]);
      const auto [jlo, jhi] = detail::overlap(pp[s], pp[s2]);
      double I = 0.0, J = 0.0;
      PauliVector Ih, Jh;
      for (std::size_t i = ilo; i < ihi; ++i) {
        const double ka = pq[s].k[i - pq[s].lo];
        const double kb = pq[s2].k[i - pq[s2].lo], db = pq[s2].d1[i - pq[s2].lo];
        for (std::size_t j = jlo; j < jhi; ++j) {
          const std::size_t node = g.index(i, j);
          if (f.s[node] < kDenominatorFloor) continue;
          const double wt = g.q.weight(i) * g.p.weight(j) / f.s[node];
          const double Ka = ka * pp[s].k[j - pp[s].lo];
          const double Kb = kb * pp[s2].k[j - pp[s2].lo];
          const double Kbq = db * pp[s2].k[j - pp[s2].lo];
          const double Kbp = kb * pp[s2].d1[j - pp[s2].lo];
          I += wt * Ka * (Kbq * f.hp[node] - Kbp * f.hq[node]);
          J += wt * Ka * Kb * f.h[node];
          Ih += (f.Hp[node] * Kbq - f.Hq[node] * Kbp) * (wt * Ka);
          Jh += f.H[node] * (wt * Ka * Kb);
        }
      }
      t.I(s, s2) = I;
      t.J(s, s2) = J;
      t.Ih(s, s2) = Ih;
      t.Jh(s, s2) = Jh;
    }
  }
  return t;
}

AxisDerivative axis_tables_derivative(std::span<const double> q, std::span<const double> p,
                                      std::span<const double> w, const QuadratureGrid& g,
                                      const KernelSpec& spec, const AxisScalar& h,
                                      const AxisOperator& H, const AxisTableWeights& cw) {
  check_coverage(g, q, p);
  const std::size_t n = q.size();
  const auto pq = detail::make_patches(g.q, q, spec);
  const auto pp = detail::make_patches(g.p, p, spec);
  const AxisFields f = sample_axis(w, g, pq, pp, h, H);

  // Integrand N = sum_ss' K_s (K^q_s' P_ss' - K^p_s' Q_ss' + K_s' R_ss') / S
  // with P, Q, R the node-local contractions of the weights with h and H.
  AxisDerivative out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<std::size_t> live;
  std::vector<double> K(n), Kq(n), Kp(n), Kqq(n), Kqp(n), Kpp(n);
  std::vector<double> u(n), v(n), y(n), z(n);
  for (std::size_t i = 0; i < g.q.count; ++i) {
    for (std::size_t j = 0; j < g.p.count; ++j) {
      const std::size_t node = g.index(i, j);
      const double S = f.s[node];
      if (S < kDenominatorFloor) continue;
      live.clear();
      for (std::size_t c = 0; c < n; ++c) {
        if (!pq[c].covers(i) || !pp[c].covers(j)) continue;
        live.push_back(c);
        const std::size_t a = i - pq[c].lo, b = j - pp[c].lo;
        K[c] = pq[c].k[a] * pp[c].k[b];
        Kq[c] = pq[c].d1[a] * pp[c].k[b];
        Kp[c] = pq[c].k[a] * pp[c].d1[b];
        Kqq[c] = pq[c].d2[a] * pp[c].k[b];
        Kqp[c] = pq[c].d1[a] * pp[c].d1[b];
        Kpp[c] = pq[c].k[a] * pp[c].d2[b];
      }
      if (live.empty()) continue;
      const Vec3 Hv = vector_part(f.H[node]), Hq = vector_part(f.Hq[node]),
                 Hp = vector_part(f.Hp[node]);
      for (std::size_t c : live) u[c] = v[c] = y[c] = z[c] = 0.0;
      double N = 0.0;
      for (std::size_t s : live) {
        for (std::size_t s2 : live) {
          const double P = cw.I(s, s2) * f.hp[node] + dot(cw.Ih(s, s2), Hp);
          const double Q = cw.I(s, s2) * f.hq[node] + dot(cw.Ih(s, s2), Hq);
          const double R = cw.J(s, s2) * f.h[node] + dot(cw.Jh(s, s2), Hv);
          u[s] += Kq[s2] * P - Kp[s2] * Q + K[s2] * R;
          v[s2] += K[s] * P;
          y[s2] += K[s] * Q;
          z[s2] += K[s] * R;
        }
        N += K[s] * u[s];
      }
      const double wt = g.q.weight(i) * g.p.weight(j);
      for (std::size_t c : live) {
        const double dNq = -Kq[c] * u[c] - (Kqq[c] * v[c] - Kqp[c] * y[c] + Kq[c] * z[c]);
        const double dNp = -Kp[c] * u[c] - (Kqp[c] * v[c] - Kpp[c] * y[c] + Kp[c] * z[c]);
        out.dq[c] += wt * (dNq / S + N * w[c] * Kq[c] / (S * S));
        out.dp[c] += wt * (dNp / S + N * w[c] * Kp[c] / (S * S));
      }
    }
  }
  return out;
}

FactorizedKoopmonTables koopmon_pairs_factorized_2dof(const Ensemble2D& e,
                                                      const FactorizedHamiltonian2D& h,
                                                      const KernelSpec& spec,
                                                      const GridParams& params) {
  h.validate();
  FactorizedKoopmonTables t;
  t.grid1 = build_grid(e.q1, e.p1, spec, params);
  t.grid2 = build_grid(e.q2, e.p2, spec, params);
  t.axis1 = axis_tables(e.q1, e.p1, e.w1, t.grid1, spec, h.h1, h.H1);
  t.axis2 = axis_tables(e.q2, e.p2, e.w2, t.grid2, spec, h.h2, h.H2);
  return t;
}

PauliVector FactorizedKoopmonTables::assemble(std::size_t a, std::size_t b, std::size_t a2,
                                              std::size_t b2) const {
  return axis1.Ih(a, a2) * axis2.J(b, b2) + axis2.Jh(b, b2) * axis1.I(a, a2) +
         axis1.Jh(a, a2) * axis2.I(b, b2) + axis2.Ih(b, b2) * axis1.J(a, a2);
}

double koopmon_pairing_2dof(const Ensemble2D& e, const FactorizedKoopmonTables& t) {
  const std::size_t n1 = e.n1(), n2 = e.n2();
  double acc = 0.0;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t a2 = 0; a2 < n1; ++a2)
        for (std::size_t b2 = 0; b2 < n2; ++b2) {
          const double ww = e.w1[a] * e.w2[b] * e.w1[a2] * e.w2[b2];
          const Vec3 x = commutator_vector(e.at(a, b), e.at(a2, b2));
          const Vec3 d = vector_part(t.assemble(a, b, a2, b2) - t.assemble(a2, b2, a, b));
          acc += ww * 2.0 * dot(x, d);
        }
  return acc;
}

std::pair<PairTable<double>, PairTable<double>> bohmion_axis_tables(std::span<const double> q,
                                                                    std::span<const double> w,
                                                                    const GridAxis& axis,
                                                                    const KernelSpec& spec) {
  check_coverage(axis, q);
  const std::size_t n = q.size();
  const auto pq = detail::make_patches(axis, q, spec);
  const auto s = axis_denominator(w, axis, pq);
  PairTable<double> I(n), J(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto [lo, hi] = detail::overlap(pq[a], pq[b]);
      double ii = 0.0, jj = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        if (s[k] < kDenominatorFloor) continue;
        const double wt = axis.weight(k) / s[k];
        ii += wt * pq[a].d1[k - pq[a].lo] * pq[b].d1[k - pq[b].lo];
        jj += wt * pq[a].k[k - pq[a].lo] * pq[b].k[k - pq[b].lo];
      }
      I(a, b) = I(b, a) = ii;
      J(a, b) = J(b, a) = jj;
    }
  }
  return {std::move(I), std::move(J)};
}

std::vector<double> bohmion_axis_derivative(std::span<const double> q, std::span<const double> w,
                                            const GridAxis& axis, const KernelSpec& spec,
                                            const PairTable<double>& wI,
                                            const PairTable<double>& wJ) {
  check_coverage(axis, q);
  const std::size_t n = q.size();
  const auto pq = detail::make_patches(axis, q, spec);
  const auto s = axis_denominator(w, axis, pq);
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> live;
  std::vector<double> K(n), D(n), D2(n), uk(n), ud(n);
  for (std::size_t i = 0; i < axis.count; ++i) {
    if (s[i] < kDenominatorFloor) continue;
    live.clear();
    for (std::size_t c = 0; c < n; ++c) {
      if (!pq[c].covers(i)) continue;
      live.push_back(c);
      K[c] = pq[c].k[i - pq[c].lo];
      D[c] = pq[c].d1[i - pq[c].lo];
      D2[c] = pq[c].d2[i - pq[c].lo];
    }
    // N = sum_ss' (wI K'_s K'_s' + wJ K_s K_s')
    double N = 0.0;
    for (std::size_t a : live) {
      double sd = 0.0, sk = 0.0;
      for (std::size_t b : live) {
        sd += (wI(a, b) + wI(b, a)) * D[b];
        sk += (wJ(a, b) + wJ(b, a)) * K[b];
        N += wI(a, b) * D[a] * D[b] + wJ(a, b) * K[a] * K[b];
      }
      ud[a] = sd;
      uk[a] = sk;
    }
    const double wt = axis.weight(i) / s[i];
    for (std::size_t c : live)
      out[c] += wt * (-(D2[c] * ud[c] + D[c] * uk[c]) + N * w[c] * D[c] / s[i]);
  }
  return out;
}

FactorizedBohmionTables bohmion_pairs_factorized_2dof(const Ensemble2D& e, const KernelSpec& spec,
                                                      const GridParams& params) {
  FactorizedBohmionTables t;
  t.axis1 = build_midpoint_axis(e.q1, spec.sigma(), params.n_q, params.j_q);
  t.axis2 = build_midpoint_axis(e.q2, spec.sigma(), params.n_q, params.j_q);
  std::tie(t.I1, t.J1) = bohmion_axis_tables(e.q1, e.w1, t.axis1, spec);
  std::tie(t.I2, t.J2) = bohmion_axis_tables(e.q2, e.w2, t.axis2, spec);
  return t;
}

double bohmion_pairing_2dof(const Ensemble2D& e, const FactorizedBohmionTables& t) {
  const std::size_t n1 = e.n1(), n2 = e.n2();
  std::vector<PauliVector> r(e.rho.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = to_pauli(e.rho[k]);
  double acc = 0.0;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t a2 = 0; a2 < n1; ++a2)
        for (std::size_t b2 = 0; b2 < n2; ++b2) {
          const double ww = e.w1[a] * e.w2[b] * e.w1[a2] * e.w2[b2];
          const double pair = 2.0 * trace_product(r[a * n2 + b], r[a2 * n2 + b2]) - 1.0;
          acc += ww * pair * (t.I1(a, a2) * t.J2(b, b2) + t.I2(b, b2) * t.J1(a, a2));
        }
  return acc;
}

}  // namespace koopmon
