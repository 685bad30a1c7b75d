#pragma once

// Hybrid quantum-classical Hamiltonians H(q,p) = H_C(q,p) 1 + H_I(q) for a
// classical degree of freedom coupled to a two-level system, plus the
// benchmark instances and their adiabatic (spectral) data.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "koopmon/pauli.hpp"

namespace koopmon {

class HybridHamiltonian {
 public:
  using PhaseFn = std::function<double(double, double)>;
  using ElectronicFn = std::function<PauliVector(double)>;

  /// `separable` promises H_C(q,p) = p^2/(2M) + U(q); the wavepacket solver
  /// relies on it.
  HybridHamiltonian(std::string name, double mass, PhaseFn classical, PhaseFn classical_dq,
                    PhaseFn classical_dp, ElectronicFn electronic, ElectronicFn electronic_dq,
                    bool separable);

  const std::string& name() const { return name_; }
  double mass() const { return mass_; }
  bool separable() const { return separable_; }

  double classical(double q, double p) const { return classical_(q, p); }
  double classical_dq(double q, double p) const { return classical_dq_(q, p); }
  double classical_dp(double q, double p) const { return classical_dp_(q, p); }

  /// Electronic matrix H_I(q) in Pauli form; any q-only scalar (e.g. Tully's
  /// H_0) sits in h0.
  PauliVector electronic(double q) const { return electronic_(q); }
  PauliVector electronic_dq(double q) const { return electronic_dq_(q); }

  /// U(q) = H_C(q, 0); meaningful when separable().
  double potential(double q) const { return classical_(q, 0.0); }

  PauliVector operator()(double q, double p) const;
  PauliVector grad_q(double q, double p) const;
  PauliVector grad_p(double q, double p) const;

 private:
  std::string name_;
  double mass_;
  PhaseFn classical_, classical_dq_, classical_dp_;
  ElectronicFn electronic_, electronic_dq_;
  bool separable_;
};

enum class TullyVariant { I, II, III };
enum class RabiRegime { ultrastrong, deep_strong };

struct TullyParams {
  TullyVariant variant = TullyVariant::I;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e0 = 0.0;
  double mass = 2000.0;

  static TullyParams defaults(TullyVariant v);
};

struct RabiParams {
  double gamma = 0.0;
  double c0 = 0.0;
  double mass = 1.0;
  double omega = 1.0;
  std::string name = "rabi";

  static RabiParams defaults(RabiRegime r);
};

HybridHamiltonian make_tully(TullyVariant variant);
HybridHamiltonian make_tully(const TullyParams& params);
HybridHamiltonian make_rabi(RabiRegime regime);
HybridHamiltonian make_rabi(const RabiParams& params);

/// Benchmark lookup by name ("tully1", "tully2", "tully3", "rabi_us",
/// "rabi_ds"). Overrides replace individual model constants (a, b, c, d, e0,
/// mass for Tully; gamma, c0, mass, omega for Rabi). Throws ConfigError.
HybridHamiltonian make_named_model(std::string_view name,
                                   const std::map<std::string, double>& overrides = {});
const std::vector<std::string>& model_names();

struct SpectralData {
  double lambda1 = 0.0;  ///< lower eigenvalue
  double lambda2 = 0.0;
  std::array<cplx, 2> v1{};
  std::array<cplx, 2> v2{};
  bool degenerate = false;
};

/// Closed-form eigensystem of a 2x2 Hermitian matrix in Pauli form.
///
/// Gauge: with h = r (sin t cos f, sin t sin f, cos t),
///   v1 = (-e^{-if} sin(t/2), cos(t/2)),  v2 = (cos(t/2), e^{if} sin(t/2)).
/// This field is smooth wherever (h1, h2) stays away from the negative z
/// axis, which covers every benchmark (h1 > 0 throughout). At exact
/// degeneracy the standard basis is returned with v1 = e2, v2 = e1 and the
/// `degenerate` flag set.
SpectralData spectral(const PauliVector& h);
SpectralData spectral(const HybridHamiltonian& h, double q);

/// Nonadiabatic coupling <v1|d/dq v2> computed from the matrix element of
/// dH/dq. Throws DegeneratePesError when the gap is below 1e-14.
double nac(const HybridHamiltonian& h, double q);

}  // namespace koopmon
