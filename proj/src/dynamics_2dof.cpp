#include "koopmon/dynamics_2dof.hpp"

#include <cmath>

#include "koopmon/errors.hpp"

namespace koopmon {

namespace {

const cplx kI{0.0, 1.0};

struct Gradient2D {
  double energy = 0.0;
  std::vector<double> dq1, dp1, dq2, dp2;
  std::vector<PauliVector> drho;
};

Gradient2D mean_field(const Ensemble2D& e, const FactorizedHamiltonian2D& h) {
  const std::size_t n1 = e.n1(), n2 = e.n2();
  Gradient2D g;
  g.dq1.assign(n1, 0.0);
  g.dp1.assign(n1, 0.0);
  g.dq2.assign(n2, 0.0);
  g.dp2.assign(n2, 0.0);
  g.drho.resize(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      const double w = e.w1[a] * e.w2[b];
      const PauliVector r = to_pauli(e.at(a, b));
      const PauliVector H = h(e.q1[a], e.p1[a], e.q2[b], e.p2[b]);
      const auto dH = h.gradient(e.q1[a], e.p1[a], e.q2[b], e.p2[b]);
      g.energy += w * trace_product(r, H);
      g.dq1[a] += w * trace_product(r, dH[0]);
      g.dp1[a] += w * trace_product(r, dH[1]);
      g.dq2[b] += w * trace_product(r, dH[2]);
      g.dp2[b] += w * trace_product(r, dH[3]);
      g.drho[a * n2 + b] = H * w;
    }
  return g;
}

PairTable<Vec3> zero_vec_table(std::size_t n) { return PairTable<Vec3>(n); }

/// Koopmon coupling 1/2 sum w w <i[rho_k, rho_k'], I_kk'> with gradients.
void add_koopmon(Gradient2D& g, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                 const CouplingSetup& setup, bool with_gradient) {
  const std::size_t n1 = e.n1(), n2 = e.n2();
  const FactorizedKoopmonTables t = koopmon_pairs_factorized_2dof(e, h, setup.kernel, setup.grid);
  std::vector<Vec3> r(n1 * n2);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = vector_part(to_pauli(e.rho[k]));

  AxisTableWeights c1{PairTable<double>(n1), PairTable<double>(n1), zero_vec_table(n1),
                      zero_vec_table(n1)};
  AxisTableWeights c2{PairTable<double>(n2), PairTable<double>(n2), zero_vec_table(n2),
                      zero_vec_table(n2)};
  std::vector<Vec3> dr(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t a2 = 0; a2 < n1; ++a2)
        for (std::size_t b2 = 0; b2 < n2; ++b2) {
          const std::size_t k = a * n2 + b, k2 = a2 * n2 + b2;
          const double ww = e.w1[a] * e.w2[b] * e.w1[a2] * e.w2[b2];
          const Vec3 x = cross(r[k], r[k2]) * (-2.0 * ww);
          const Vec3 v = vector_part(t.assemble(a, b, a2, b2));
          g.energy += dot(x, v);
          if (!with_gradient) continue;
          // d/dr_k of -2 (r_k x r_k2).v and of -2 (r_k2' x r_k).v'
          dr[k] += cross(r[k2], v) * (-2.0 * ww);
          dr[k2] += cross(v, r[k]) * (-2.0 * ww);
          c1.Ih(a, a2) += x * t.axis2.J(b, b2);
          c1.I(a, a2) += dot(x, vector_part(t.axis2.Jh(b, b2)));
          c1.Jh(a, a2) += x * t.axis2.I(b, b2);
          c1.J(a, a2) += dot(x, vector_part(t.axis2.Ih(b, b2)));
          c2.J(b, b2) += dot(x, vector_part(t.axis1.Ih(a, a2)));
          c2.Jh(b, b2) += x * t.axis1.I(a, a2);
          c2.I(b, b2) += dot(x, vector_part(t.axis1.Jh(a, a2)));
          c2.Ih(b, b2) += x * t.axis1.J(a, a2);
        }
  if (!with_gradient) return;
  for (std::size_t k = 0; k < dr.size(); ++k) g.drho[k] += from_vector(0.0, dr[k] * 0.5);
  const AxisDerivative d1 =
      axis_tables_derivative(e.q1, e.p1, e.w1, t.grid1, setup.kernel, h.h1, h.H1, c1);
  const AxisDerivative d2 =
      axis_tables_derivative(e.q2, e.p2, e.w2, t.grid2, setup.kernel, h.h2, h.H2, c2);
  for (std::size_t a = 0; a < n1; ++a) {
    g.dq1[a] += d1.dq[a];
    g.dp1[a] += d1.dp[a];
  }
  for (std::size_t b = 0; b < n2; ++b) {
    g.dq2[b] += d2.dq[b];
    g.dp2[b] += d2.dp[b];
  }
}

/// Bohmion coupling 1/(8M) sum w w (2<rho_k, rho_k'> - 1)(I1 J2 + I2 J1).
void add_bohmion(Gradient2D& g, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                 const CouplingSetup& setup, bool with_gradient) {
  const std::size_t n1 = e.n1(), n2 = e.n2();
  const FactorizedBohmionTables t = bohmion_pairs_factorized_2dof(e, setup.kernel, setup.grid);
  const double scale = 1.0 / (8.0 * h.mass);
  std::vector<PauliVector> r(n1 * n2);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = to_pauli(e.rho[k]);

  PairTable<double> wI1(n1), wJ1(n1), wI2(n2), wJ2(n2);
  std::vector<PauliVector> dr(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t a2 = 0; a2 < n1; ++a2)
        for (std::size_t b2 = 0; b2 < n2; ++b2) {
          const std::size_t k = a * n2 + b, k2 = a2 * n2 + b2;
          const double ww = scale * e.w1[a] * e.w2[b] * e.w1[a2] * e.w2[b2];
          const double pair = 2.0 * trace_product(r[k], r[k2]) - 1.0;
          const double T = t.I1(a, a2) * t.J2(b, b2) + t.I2(b, b2) * t.J1(a, a2);
          g.energy += ww * pair * T;
          if (!with_gradient) continue;
          // d(2 Tr(rho rho'))/d(r0, r) = 4 (r0', r')
          dr[k] += r[k2] * (4.0 * ww * T);
          dr[k2] += r[k] * (4.0 * ww * T);
          wI1(a, a2) += ww * pair * t.J2(b, b2);
          wJ1(a, a2) += ww * pair * t.I2(b, b2);
          wI2(b, b2) += ww * pair * t.J1(a, a2);
          wJ2(b, b2) += ww * pair * t.I1(a, a2);
        }
  if (!with_gradient) return;
  for (std::size_t k = 0; k < dr.size(); ++k) g.drho[k] += dr[k] * 0.5;
  const auto d1 = bohmion_axis_derivative(e.q1, e.w1, t.axis1, setup.kernel, wI1, wJ1);
  const auto d2 = bohmion_axis_derivative(e.q2, e.w2, t.axis2, setup.kernel, wI2, wJ2);
  for (std::size_t a = 0; a < n1; ++a) g.dq1[a] += d1[a];
  for (std::size_t b = 0; b < n2; ++b) g.dq2[b] += d2[b];
}

Gradient2D gradient(Method m, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                    const CouplingSetup& setup, bool with_gradient) {
  h.validate();
  Gradient2D g = mean_field(e, h);
  if (m == Method::koopmon && e.rho.size() > 1) add_koopmon(g, e, h, setup, with_gradient);
  if (m == Method::bohmion) add_bohmion(g, e, h, setup, with_gradient);
  return g;
}

Ensemble2D axpy(const Ensemble2D& e, const Ensemble2DDerivative& d, double s) {
  Ensemble2D out = e;
  for (std::size_t a = 0; a < e.n1(); ++a) {
    out.q1[a] += s * d.dq1[a];
    out.p1[a] += s * d.dp1[a];
  }
  for (std::size_t b = 0; b < e.n2(); ++b) {
    out.q2[b] += s * d.dq2[b];
    out.p2[b] += s * d.dp2[b];
  }
  for (std::size_t k = 0; k < e.rho.size(); ++k) out.rho[k] += d.drho[k] * s;
  return out;
}

}  // namespace

double energy_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                   const CouplingSetup& setup) {
  return gradient(method, e, h, setup, false).energy;
}

Ensemble2DDerivative rhs_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                              const CouplingSetup& setup) {
  const Gradient2D g = gradient(method, e, h, setup, true);
  const std::size_t n1 = e.n1(), n2 = e.n2();
  Ensemble2DDerivative d;
  d.dq1.resize(n1);
  d.dp1.resize(n1);
  d.dq2.resize(n2);
  d.dp2.resize(n2);
  d.drho.resize(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a) {
    d.dq1[a] = g.dp1[a] / e.w1[a];
    d.dp1[a] = -g.dq1[a] / e.w1[a];
  }
  for (std::size_t b = 0; b < n2; ++b) {
    d.dq2[b] = g.dp2[b] / e.w2[b];
    d.dp2[b] = -g.dq2[b] / e.w2[b];
  }
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      const std::size_t k = a * n2 + b;
      const double inv = 1.0 / (e.w1[a] * e.w2[b]);
      d.drho[k] = commutator(to_matrix(g.drho[k]), e.rho[k]) * (-kI * inv);
    }
  for (double x : d.dq1)
    if (!std::isfinite(x)) throw NonFiniteError("non-finite 2-DOF derivative");
  for (double x : d.dq2)
    if (!std::isfinite(x)) throw NonFiniteError("non-finite 2-DOF derivative");
  return d;
}

Ensemble2D rk4_step_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                         const CouplingSetup& setup, double dt) {
  auto f = [&](const Ensemble2D& s) { return rhs_2dof(method, s, h, setup); };
  const auto k1 = f(e);
  const auto k2 = f(axpy(e, k1, 0.5 * dt));
  const auto k3 = f(axpy(e, k2, 0.5 * dt));
  const auto k4 = f(axpy(e, k3, dt));
  Ensemble2D out = e;
  const double s = dt / 6.0;
  for (std::size_t a = 0; a < e.n1(); ++a) {
    out.q1[a] += s * (k1.dq1[a] + 2.0 * k2.dq1[a] + 2.0 * k3.dq1[a] + k4.dq1[a]);
    out.p1[a] += s * (k1.dp1[a] + 2.0 * k2.dp1[a] + 2.0 * k3.dp1[a] + k4.dp1[a]);
  }
  for (std::size_t b = 0; b < e.n2(); ++b) {
    out.q2[b] += s * (k1.dq2[b] + 2.0 * k2.dq2[b] + 2.0 * k3.dq2[b] + k4.dq2[b]);
    out.p2[b] += s * (k1.dp2[b] + 2.0 * k2.dp2[b] + 2.0 * k3.dp2[b] + k4.dp2[b]);
  }
  for (std::size_t k = 0; k < e.rho.size(); ++k)
    out.rho[k] += (k1.drho[k] + k2.drho[k] * 2.0 + k3.drho[k] * 2.0 + k4.drho[k]) * s;
  rehermitize(out.rho);
  return out;
}

}  // namespace koopmon
