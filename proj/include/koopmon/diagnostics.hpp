#pragma once

// Populations, purity, Bloch vector and the phase-space / configuration-space
// densities used to compare the methods.

#include <iosfwd>
#include <string>
#include <vector>

#include "koopmon/ensemble.hpp"
#include "koopmon/hybrid_models.hpp"
#include "koopmon/pauli.hpp"
#include "koopmon/regularization.hpp"
#include "koopmon/soft.hpp"

namespace koopmon {

struct DiagnosticsRecord {
  double t = 0.0;
  double P1 = 0.0, P2 = 0.0;
  double purity = 0.0;
  Vec3 bloch;
  double energy = 0.0;
  double energy_drift_rel = 0.0;
};

/// b = (2 Re rho12, -2 Im rho12, rho11 - rho22), i.e. rho = (1 + b.sigma)/2.
Vec3 bloch_vector(const Mat2& rho);
double purity_from_bloch(const Vec3& b);

/// Populations from the adiabatic projection at each particle's q; purity
/// and Bloch vector from the aggregate density. Energy fields are left 0.
DiagnosticsRecord particle_diagnostics(const ParticleEnsemble& e, const HybridHamiltonian& h);

DiagnosticsRecord soft_diagnostics(const SoftObservables& o, double t);

void write_timeseries_header(std::ostream& os);
void write_timeseries_row(std::ostream& os, const DiagnosticsRecord& r);

/// Values on a uniform grid; `y` has count 1 for 1D fields. Row-major in
/// (x index, y index).
struct DensityField {
  std::string kind;  ///< wigner | smoothed_cloud | waterfall
  GridAxis x;
  GridAxis y;
  double delta = 0.0;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[i * y.count + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * y.count + j]; }
  /// Plain Riemann sum over the nodes (the grids are periodic or the field
  /// decays at the edges).
  double integral() const;
};

/// Wigner function W_psi1 + W_psi2 on spatial nodes q = r_j (every
/// `q_stride`-th) and the FFT-native momenta p_k = pi k / (n dr),
/// k = -n/2..n/2-1.
DensityField wigner(const WavepacketState& s, std::size_t q_stride = 1);

/// Wigner restricted to a phase-space window, subsampled to at most
/// `max_nodes` nodes per axis. Values are exact (no interpolation).
DensityField wigner_window(const WavepacketState& s, double q_lo, double q_hi, double p_lo,
                           double p_hi, std::size_t max_nodes = 256);

/// D(z) = sum_a w_a K^(Delta)(q - q_a) K^(Delta)(p - p_a).
DensityField smoothed_cloud(const ParticleEnsemble& e, double delta, const GridAxis& q,
                            const GridAxis& p);

/// D~(r) = sum_a w_a K^(Delta)(r - q_a).
DensityField waterfall_slice(const ParticleEnsemble& e, double delta, const GridAxis& r);
/// |Psi(r)|^2 on the wavefunction grid.
DensityField waterfall_slice(const WavepacketState& s);

/// Header lines with the axis metadata, then one row per x node.
void write_density_field(std::ostream& os, const DensityField& f);

}  // namespace koopmon
