#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "koopmon/pauli.hpp"

namespace koopmon {

using DensityMatrix2 = Mat2;

/// N particles with phase-space points (q_a, p_a), weights w_a and 2x2
/// density matrices. Struct-of-arrays; all vectors have the same length.
struct ParticleEnsemble {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> w;
  std::vector<DensityMatrix2> rho;

  std::size_t size() const { return q.size(); }

  /// Uniform weights 1/N, every density matrix set to rho0.
  static ParticleEnsemble uniform(std::vector<double> q, std::vector<double> p,
                                  const DensityMatrix2& rho0);
};

/// Two degrees of freedom under the multi-index closure: axis-1 coordinates
/// depend only on a, axis-2 coordinates only on b, w_(a,b) = w1_a w2_b.
struct Ensemble2D {
  std::vector<double> q1, p1, w1;  // size n1
  std::vector<double> q2, p2, w2;  // size n2
  std::vector<DensityMatrix2> rho;  // n1 * n2, row-major in (a, b)

  std::size_t n1() const { return q1.size(); }
  std::size_t n2() const { return q2.size(); }
  DensityMatrix2& at(std::size_t a, std::size_t b) { return rho[a * n2() + b]; }
  const DensityMatrix2& at(std::size_t a, std::size_t b) const { return rho[a * n2() + b]; }
};

DensityMatrix2 projector(const std::array<cplx, 2>& v);

/// sum_a w_a rho_a
DensityMatrix2 aggregate_density(const ParticleEnsemble& e);

double purity(const DensityMatrix2& rho);

struct Violation {
  std::size_t index;  ///< particle index, or size() for ensemble-wide checks
  std::string what;
  double magnitude;
};

struct ValidationTolerance {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double eigenvalue = 1e-10;
  double weights = 1e-12;

  /// Every tolerance set to the same value.
  static ValidationTolerance uniform(double tol) { return {tol, tol, tol, tol}; }
};

std::vector<Violation> validate(const ParticleEnsemble& e, const ValidationTolerance& tol = {});

/// Replace each rho_a by its Hermitian part and renormalize the trace when it
/// has drifted from 1 by more than 1e-12.
void rehermitize(std::vector<DensityMatrix2>& rho);

/// Tab-separated snapshot: header then index, q, p, w, rho11, re_rho12,
/// im_rho12, rho22 per particle.
void write_snapshot(std::ostream& os, const ParticleEnsemble& e);
ParticleEnsemble read_snapshot(std::istream& is);

}  // namespace koopmon
