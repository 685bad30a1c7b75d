#pragma once

// Fully quantum reference: split-operator Fourier propagation of a
// two-component wavefunction on a periodic grid.

#include <array>
#include <cstddef>
#include <memory>
#include <iosfwd>
#include <vector>

#include "koopmon/hybrid_models.hpp"
#include "koopmon/pauli.hpp"

namespace koopmon {

/// Nodes r_j = r_min + j dr, j = 0..n-1, dr = (r_max - r_min)/n (periodic).
struct SpatialGrid1D {
  double r_min = -1.0;
  double r_max = 1.0;
  std::size_t n = 64;

  double dr() const { return (r_max - r_min) / static_cast<double>(n); }
  double node(std::size_t j) const { return r_min + static_cast<double>(j) * dr(); }
  /// FFT wavenumber of bin j.
  double k(std::size_t j) const;
  /// Throws ConfigError unless n is a power of two >= 4 and r_max > r_min.
  void validate() const;
};

struct WavepacketState {
  SpatialGrid1D grid;
  std::vector<cplx> psi1, psi2;
  double t = 0.0;
};

/// (gamma/pi)^(1/4) exp(i mu_p (r - mu_q) - gamma (r - mu_q)^2 / 2) v0 with
/// gamma = 1/(2 sigma_q^2).
WavepacketState init_wavepacket(const SpatialGrid1D& grid, double mu_q, double mu_p,
                                double sigma_q, const std::array<cplx, 2>& v0);

double norm(const WavepacketState& s);
/// Probability within `width` of either grid edge.
double boundary_mass(const WavepacketState& s, double width);

class SoftPropagator {
 public:
  /// Requires a separable Hamiltonian p^2/(2M) + U(q) + H_I(q).
  SoftPropagator(const SpatialGrid1D& grid, const HybridHamiltonian& h, double dt);
  ~SoftPropagator();
  SoftPropagator(const SoftPropagator&) = delete;
  SoftPropagator& operator=(const SoftPropagator&) = delete;

  /// Half kinetic, full potential, half kinetic.
  void step(WavepacketState& s) const;

  /// <Psi|H|Psi> with the kinetic term evaluated spectrally.
  double energy(const WavepacketState& s) const;

  double dt() const { return dt_; }

 private:
  struct Fft;
  SpatialGrid1D grid_;
  double dt_;
  double mass_;
  std::vector<cplx> half_kinetic_;
  std::vector<Mat2> potential_step_;
  std::vector<PauliVector> potential_;
  std::unique_ptr<Fft> fft_;
};

struct SoftObservables {
  double norm = 0.0;
  double energy = 0.0;
  Mat2 density;  ///< int Psi Psi^dagger dr
  double P1 = 0.0, P2 = 0.0;
  double purity = 0.0;
};

SoftObservables observables(const WavepacketState& s, const HybridHamiltonian& h,
                            const SoftPropagator& prop);

/// Rows of r, Re psi1, Im psi1, Re psi2, Im psi2 with a header line.
void write_wavefunction(std::ostream& os, const WavepacketState& s);

}  // namespace koopmon
