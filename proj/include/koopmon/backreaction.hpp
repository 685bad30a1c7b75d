#pragma once

// Pairwise trajectory-coupling integrals.
//
// Two independent routes are provided for every coupling energy:
//  * pair tables (one integral per particle pair, the textbook definition),
//    kept as the serial reference;
//  * coupling fields, where the pair sums are folded into a handful of
//    regularized fields on the grid before integrating. The fields also give
//    the exact gradient of the discretized energy and run in O(N * patch).
// Both use the same kernel cutoff, box and trapezoid weights, so they agree
// to round-off.

#include <cstddef>
#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "koopmon/ensemble.hpp"
#include "koopmon/hybrid_models.hpp"
#include "koopmon/pauli.hpp"
#include "koopmon/regularization.hpp"

namespace koopmon {

template <class T>
class PairTable {
 public:
  PairTable() = default;
  explicit PairTable(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t a, std::size_t b) { return data_[a * n_ + b]; }
  const T& operator()(std::size_t a, std::size_t b) const { return data_[a * n_ + b]; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// I_ab = 1/2 int (K_a{K_b,H} - K_b{K_a,H}) / sum_c w_c K_c dq dp, in Pauli
/// form. Only a < b is integrated; the rest follows from antisymmetry.
PairTable<PauliVector> koopmon_pairs(const ParticleEnsemble& e, const HybridHamiltonian& h,
                                     const QuadratureGrid& grid, const KernelSpec& spec);

/// I_ab = int dK_a dK_b / sum_c w_c K_c dr over the configuration axis.
PairTable<double> bohmion_pairs(const ParticleEnsemble& e, const GridAxis& axis,
                                const KernelSpec& spec);

/// 1/2 sum_ab w_a w_b <i[rho_a, rho_b], I_ab>
double koopmon_coupling_energy(const ParticleEnsemble& e, const PairTable<PauliVector>& table);

/// 1/(8M) sum_ab w_a w_b (2 <rho_a, rho_b> - 1) I_ab
double bohmion_coupling_energy(const ParticleEnsemble& e, double mass,
                               const PairTable<double>& table);

/// Coupling energy with its gradient. `drho[a]` holds the Pauli
/// coefficients of the Hermitian G_a with dE = sum_a Tr(G_a d rho_a).
struct CouplingGradient {
  double energy = 0.0;
  std::vector<double> dq;
  std::vector<double> dp;
  std::vector<PauliVector> drho;
};

/// Field route for the koopmon coupling (OpenMP). Requires the
/// interaction to be momentum-independent, which the Hamiltonian type
/// guarantees.
CouplingGradient koopmon_coupling(const ParticleEnsemble& e, const HybridHamiltonian& h,
                                  const QuadratureGrid& grid, const KernelSpec& spec,
                                  bool with_gradient = true);

/// Field route for the bohmion quantum-potential coupling (OpenMP).
CouplingGradient bohmion_coupling(const ParticleEnsemble& e, double mass, const GridAxis& axis,
                                  const KernelSpec& spec, bool with_gradient = true);

// ---------------------------------------------------------------------------
// Two degrees of freedom.

/// Scalar or operator valued function on one axis' phase space.
struct AxisScalar {
  std::function<double(double, double)> value, dq, dp;
  explicit operator bool() const { return static_cast<bool>(value); }
};
struct AxisOperator {
  std::function<PauliVector(double, double)> value, dq, dp;
  explicit operator bool() const { return static_cast<bool>(value); }
};

/// H(z1, z2) = H_c(z1, z2) 1 + H_Q + h1(z1) H2(z2) + h2(z2) H1(z1).
struct FactorizedHamiltonian2D {
  std::function<double(double, double, double, double)> classical;
  std::function<std::array<double, 4>(double, double, double, double)> classical_grad;
  PauliVector quantum;
  AxisScalar h1;    // on z1
  AxisOperator H2;  // on z2
  AxisScalar h2;    // on z2
  AxisOperator H1;  // on z1
  double mass = 1.0;

  /// Throws DecompositionError when a product term is half-specified or the
  /// classical part is missing.
  void validate() const;

  PauliVector operator()(double q1, double p1, double q2, double p2) const;
  /// d/dq1, d/dp1, d/dq2, d/dp2
  std::array<PauliVector, 4> gradient(double q1, double p1, double q2, double p2) const;
};

struct AxisTables {
  PairTable<double> I;       ///< int K^s {K^s', h} / S
  PairTable<double> J;       ///< int K^s K^s' h / S
  PairTable<PauliVector> Ih;  ///< int K^s {K^s', H} / S
  PairTable<PauliVector> Jh;  ///< int K^s K^s' H / S
};

struct FactorizedKoopmonTables {
  AxisTables axis1;  // h1, H1
  AxisTables axis2;  // h2, H2
  QuadratureGrid grid1, grid2;

  /// I_{aba'b'} assembled from the per-axis tables (identity-proportional
  /// constant omitted).
  PauliVector assemble(std::size_t a, std::size_t b, std::size_t a2, std::size_t b2) const;
};

FactorizedKoopmonTables koopmon_pairs_factorized_2dof(const Ensemble2D& e,
                                                      const FactorizedHamiltonian2D& h,
                                                      const KernelSpec& spec,
                                                      const GridParams& params);

/// sum_{k,k'} w_k w_k' <i[rho_k, rho_k'], I_kk' - I_k'k>
double koopmon_pairing_2dof(const Ensemble2D& e, const FactorizedKoopmonTables& t);

struct FactorizedBohmionTables {
  PairTable<double> I1, J1, I2, J2;
  GridAxis axis1, axis2;
};

FactorizedBohmionTables bohmion_pairs_factorized_2dof(const Ensemble2D& e, const KernelSpec& spec,
                                                      const GridParams& params);

/// sum_{k,k'} w_k w_k' (2<rho_k, rho_k'> - 1)(I1 J2 + I2 J1)
double bohmion_pairing_2dof(const Ensemble2D& e, const FactorizedBohmionTables& t);

// Building blocks shared with the 2-DOF propagator.

/// Tables of one axis for particles (q, p, w) on a phase-space grid. Empty
/// factors give zero tables.
AxisTables axis_tables(std::span<const double> q, std::span<const double> p,
                       std::span<const double> w, const QuadratureGrid& grid,
                       const KernelSpec& spec, const AxisScalar& h, const AxisOperator& H);

/// Coefficients of an energy that is linear in one axis' tables (only the
/// Pauli-vector part of the operator tables enters).
struct AxisTableWeights {
  PairTable<double> I, J;
  PairTable<Vec3> Ih, Jh;
};

struct AxisDerivative {
  std::vector<double> dq, dp;
};

/// Gradient of sum_{ss'} weights . tables with respect to each particle's
/// (q, p), differentiating both the kernels and the shared denominator.
AxisDerivative axis_tables_derivative(std::span<const double> q, std::span<const double> p,
                                      std::span<const double> w, const QuadratureGrid& grid,
                                      const KernelSpec& spec, const AxisScalar& h,
                                      const AxisOperator& H, const AxisTableWeights& weights);

/// I = int dK dK / S and J = int K K / S on a configuration axis.
std::pair<PairTable<double>, PairTable<double>> bohmion_axis_tables(std::span<const double> q,
                                                                    std::span<const double> w,
                                                                    const GridAxis& axis,
                                                                    const KernelSpec& spec);

/// d/dq of sum_{ss'} (wI I + wJ J).
std::vector<double> bohmion_axis_derivative(std::span<const double> q, std::span<const double> w,
                                            const GridAxis& axis, const KernelSpec& spec,
                                            const PairTable<double>& wI,
                                            const PairTable<double>& wJ);

}  // namespace koopmon
