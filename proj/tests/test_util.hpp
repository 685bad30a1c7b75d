#pragma once

// Fixtures and finite-difference oracles shared by the unit and acceptance
// tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "koopmon/dynamics.hpp"
#include "koopmon/ensemble.hpp"
#include "koopmon/pauli.hpp"

namespace koopmon::testing {

inline DensityMatrix2 pure_state(double theta, double phi) {
  return projector({cplx{std::cos(theta / 2)}, std::polar(std::sin(theta / 2), phi)});
}

/// Mixed state with Bloch vector b (|b| <= 1).
inline DensityMatrix2 bloch_state(double bx, double by, double bz) {
  return to_matrix({0.5, 0.5 * bx, 0.5 * by, 0.5 * bz});
}

/// Four particles with distinct, non-commuting density matrices.
inline ParticleEnsemble four_particles(std::array<double, 4> q, std::array<double, 4> p) {
  ParticleEnsemble e;
  e.q.assign(q.begin(), q.end());
  e.p.assign(p.begin(), p.end());
  e.w = {0.31, 0.19, 0.27, 0.23};
  e.rho = {pure_state(0.4, 0.3), bloch_state(0.2, -0.5, 0.6), pure_state(2.1, -1.2),
           bloch_state(-0.7, 0.1, 0.3)};
  return e;
}

inline ParticleEnsemble tully_four() {
  return four_particles({-0.35, -0.05, 0.2, 0.5}, {10.0, 9.6, 10.5, 10.2});
}

inline ParticleEnsemble rabi_four() {
  return four_particles({-0.45, -0.1, 0.15, 0.5}, {3.7, 4.2, 3.9, 4.4});
}

inline const std::array<PauliVector, 3>& pauli_basis() {
  static const std::array<PauliVector, 3> b = {PauliVector{0, 1, 0, 0}, PauliVector{0, 0, 1, 0},
                                               PauliVector{0, 0, 0, 1}};
  return b;
}

/// rho -> rho + eps i[A, rho]; the derivative of E along this curve equals
/// w Tr(A drho/dt) for drho/dt = -i w^-1 [G, rho].
inline DensityMatrix2 rotate(const DensityMatrix2& rho, const PauliVector& A, double eps) {
  return rho + commutator(to_matrix(A), rho) * cplx{0.0, eps};
}

inline double central(const std::function<double(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

/// max |a - b| / max |b| over all entries.
inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

struct GradientCheck {
  double dq = 0.0;       ///< relative error of dq/dt
  double dp = 0.0;       ///< relative error of dp/dt
  double quantum = 0.0;  ///< relative error of Tr(A drho/dt)
  double worst() const { return std::max({dq, dp, quantum}); }
};

/// Compares rhs against central differences of energy(), both on the grid
/// built from `e` (held fixed during the differences).
inline GradientCheck check_gradient(Method m, const ParticleEnsemble& e, const HybridHamiltonian& h,
                                    const CouplingSetup& setup, double step = 1e-5) {
  const QuadratureGrid grid = method_grid(m, e, setup);
  const EnsembleDerivative d = rhs(m, e, h, setup.kernel, grid);
  auto E = [&](const ParticleEnsemble& s) { return energy(m, s, h, setup.kernel, grid); };

  std::vector<double> qa, qf, pa, pf, qan, qfd;
  for (std::size_t a = 0; a < e.size(); ++a) {
    auto shift_q = [&](double eps) {
      ParticleEnsemble s = e;
      s.q[a] += eps;
      return E(s);
    };
    auto shift_p = [&](double eps) {
      ParticleEnsemble s = e;
      s.p[a] += eps;
      return E(s);
    };
    qa.push_back(d.dq[a]);
    qf.push_back(central(shift_p, step) / e.w[a]);
    pa.push_back(d.dp[a]);
    pf.push_back(-central(shift_q, step) / e.w[a]);
    for (const PauliVector& A : pauli_basis()) {
      auto rot = [&](double eps) {
        ParticleEnsemble s = e;
        s.rho[a] = rotate(e.rho[a], A, eps);
        return E(s);
      };
      qan.push_back((to_matrix(A) * d.drho[a]).trace().real());
      qfd.push_back(central(rot, step) / e.w[a]);
    }
  }
  return {rel_error(qa, qf), rel_error(pa, pf), rel_error(qan, qfd)};
}

}  // namespace koopmon::testing
