#pragma once

// Two classical degrees of freedom with the multi-index ensemble: particle
// (a, b) sits at (z1_a, z2_b) with weight w_a w_b. Axis coordinates are
// shared, so z1_a moves with the total weight w_a of its row:
//   dq1_a/dt = w_a^-1 dh/dp1_a,  d rho_ab/dt = -i (w_a w_b)^-1 [G_ab, rho_ab].

#include <vector>

#include "koopmon/backreaction.hpp"
#include "koopmon/dynamics.hpp"
#include "koopmon/ensemble.hpp"

namespace koopmon {

struct Ensemble2DDerivative {
  std::vector<double> dq1, dp1, dq2, dp2;
  std::vector<DensityMatrix2> drho;
};

double energy_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                   const CouplingSetup& setup);

Ensemble2DDerivative rhs_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                              const CouplingSetup& setup);

Ensemble2D rk4_step_2dof(Method method, const Ensemble2D& e, const FactorizedHamiltonian2D& h,
                         const CouplingSetup& setup, double dt);

}  // namespace koopmon
