#pragma once

// Equations of motion for the particle methods and their RK4 integration.
//
// Every method is Hamiltonian: with the method's energy h(q, p, rho),
//   dq_a/dt = w_a^-1 dh/dp_a,   dp_a/dt = -w_a^-1 dh/dq_a,
//   d rho_a/dt = -i w_a^-1 [G_a, rho_a],   dh = sum_a Tr(G_a d rho_a).

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "koopmon/backreaction.hpp"
#include "koopmon/diagnostics.hpp"
#include "koopmon/ensemble.hpp"
#include "koopmon/hybrid_models.hpp"
#include "koopmon/regularization.hpp"

namespace koopmon {

enum class Method { koopmon, ehrenfest, bohmion };

std::string to_string(Method m);
/// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);

struct EnsembleDerivative {
  std::vector<double> dq;
  std::vector<double> dp;
  std::vector<DensityMatrix2> drho;
};

/// Regularization settings shared by the coupled methods.
struct CouplingSetup {
  KernelSpec kernel;
  GridParams grid;
};

/// Grid used by `method` for the given state. Ehrenfest needs none and gets
/// an empty grid; bohmions only use the q axis.
QuadratureGrid method_grid(Method method, const ParticleEnsemble& e, const CouplingSetup& setup);

/// Right-hand side on a fixed grid.
EnsembleDerivative rhs(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                       const KernelSpec& spec, const QuadratureGrid& grid);
/// Right-hand side with the grid built from `e`.
EnsembleDerivative rhs(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                       const CouplingSetup& setup);

double energy(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
              const KernelSpec& spec, const QuadratureGrid& grid);
double energy(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
              const CouplingSetup& setup);

/// Classical RK4; the grid is rebuilt from each stage state and the density
/// matrices are re-Hermitized afterwards.
ParticleEnsemble rk4_step(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                          const CouplingSetup& setup, double dt);

/// Generic RK4 on an ensemble with a caller-supplied derivative.
using EnsembleField = std::function<EnsembleDerivative(const ParticleEnsemble&)>;
ParticleEnsemble rk4_step(const EnsembleField& f, const ParticleEnsemble& e, double dt);

struct PropagationSettings {
  double dt = 1.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  double drift_tolerance = 1e-2;
  /// Abort once the drift exceeds this multiple of the tolerance.
  double abort_factor = 10.0;
};

/// Step index closest to t; halfway cases go to the earlier step.
long nearest_step(double t, double dt);
long step_count(double t_final, double dt);

struct PropagationObserver {
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(double t_requested, double t_actual, const ParticleEnsemble&)> on_snapshot;
  std::function<void(long step, double t, const ParticleEnsemble&)> on_step;
};

struct PropagationResult {
  ParticleEnsemble final_state;
  double initial_energy = 0.0;
  double max_drift = 0.0;
  long steps = 0;
};

/// Fixed-step march with per-step diagnostics. Throws EnergyDriftError when
/// the relative drift passes abort_factor * drift_tolerance; records already
/// delivered to the observer remain valid.
PropagationResult propagate(Method method, const ParticleEnsemble& e0, const HybridHamiltonian& h,
                            const CouplingSetup& setup, const PropagationSettings& settings,
                            const PropagationObserver& observer = {});

/// Relative drift |h - h0| / |h0|, absolute when h0 vanishes.
double relative_drift(double h, double h0);

}  // namespace koopmon
