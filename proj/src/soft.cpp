#include "koopmon/soft.hpp"

#include <fftw3.h>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "koopmon/errors.hpp"

namespace koopmon {

double SpatialGrid1D::k(std::size_t j) const {
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dr());
  const auto jj = static_cast<double>(j);
  return j < n / 2 ? jj * dk : (jj - static_cast<double>(n)) * dk;
}

void SpatialGrid1D::validate() const {
  if (!(r_max > r_min)) throw ConfigError("soft grid needs r_max > r_min");
  if (n < 4 || (n & (n - 1)) != 0) throw ConfigError("soft grid size must be a power of two >= 4");
}

WavepacketState init_wavepacket(const SpatialGrid1D& grid, double mu_q, double mu_p,
                                double sigma_q, const std::array<cplx, 2>& v0) {
  grid.validate();
  if (!(sigma_q > 0.0)) throw ConfigError("wavepacket width must be positive");
  const double vn = std::sqrt(std::norm(v0[0]) + std::norm(v0[1]));
  if (std::abs(vn - 1.0) > 1e-12) throw ConfigError("initial spinor must have unit norm");
  const double gamma = 1.0 / (2.0 * sigma_q * sigma_q);
  const double amp = std::pow(gamma / std::numbers::pi, 0.25);
  WavepacketState s;
  s.grid = grid;
  s.psi1.resize(grid.n);
  s.psi2.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.node(j) - mu_q;
    const cplx psi = amp * std::exp(cplx{-0.5 * gamma * x * x, mu_p * x});
    s.psi1[j] = psi * v0[0];
    s.psi2[j] = psi * v0[1];
  }
  return s;
}

double norm(const WavepacketState& s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) acc += std::norm(s.psi1[j]) + std::norm(s.psi2[j]);
  return acc * s.grid.dr();
}

double boundary_mass(const WavepacketState& s, double width) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    const double r = s.grid.node(j);
    if (r - s.grid.r_min < width || s.grid.r_max - r <= width)
      acc += std::norm(s.psi1[j]) + std::norm(s.psi2[j]);
  }
  return acc * s.grid.dr();
}

struct SoftPropagator::Fft {
  std::size_t n;
  fftw_complex* buf;
  fftw_plan forward;
  fftw_plan backward;

  explicit Fft(std::size_t size) : n(size) {
    buf = fftw_alloc_complex(n);
    forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buf);
  }
  cplx* data() const { return reinterpret_cast<cplx*>(buf); }

  /// psi <- IFFT(phase * FFT(psi)), normalized.
  void multiply_spectral(std::vector<cplx>& psi, const std::vector<cplx>& phase) const {
    cplx* d = data();
    std::copy(psi.begin(), psi.end(), d);
    fftw_execute(forward);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) d[j] *= phase[j] * inv;
    fftw_execute(backward);
    std::copy(d, d + n, psi.begin());
  }

  double kinetic(const std::vector<cplx>& psi, const std::vector<double>& k2, double scale) const {
    cplx* d = data();
    std::copy(psi.begin(), psi.end(), d);
    fftw_execute(forward);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += std::norm(d[j]) * k2[j];
    return acc * scale;
  }
};

SoftPropagator::SoftPropagator(const SpatialGrid1D& grid, const HybridHamiltonian& h, double dt)
    : grid_(grid), dt_(dt), mass_(h.mass()) {
  grid.validate();
  if (!h.separable())
    throw SolverError("the wavepacket solver needs p^2/(2M) + U(q) + H_I(q); '" + h.name() +
                      "' is not of that form");
  if (!(dt > 0.0)) throw ConfigError("soft time step must be positive");
  const std::size_t n = grid.n;
  half_kinetic_.resize(n);
  potential_step_.resize(n);
  potential_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid.k(j);
    half_kinetic_[j] = std::exp(cplx{0.0, -dt * k * k / (4.0 * mass_)});
    const double r = grid.node(j);
    PauliVector v = h.electronic(r);
    v.h0 += h.potential(r);
    potential_[j] = v;
    potential_step_[j] = unitary_exp(v, dt);
  }
  fft_ = std::make_unique<Fft>(n);
}

SoftPropagator::~SoftPropagator() = default;

void SoftPropagator::step(WavepacketState& s) const {
  fft_->multiply_spectral(s.psi1, half_kinetic_);
  fft_->multiply_spectral(s.psi2, half_kinetic_);
  for (std::size_t j = 0; j < grid_.n; ++j) {
    const Mat2& u = potential_step_[j];
    const cplx a = s.psi1[j], b = s.psi2[j];
    s.psi1[j] = u(0, 0) * a + u(0, 1) * b;
    s.psi2[j] = u(1, 0) * a + u(1, 1) * b;
  }
  fft_->multiply_spectral(s.psi1, half_kinetic_);
  fft_->multiply_spectral(s.psi2, half_kinetic_);
  s.t += dt_;
}

double SoftPropagator::energy(const WavepacketState& s) const {
  const std::size_t n = grid_.n;
  std::vector<double> k2(n);
  for (std::size_t j = 0; j < n; ++j) k2[j] = grid_.k(j) * grid_.k(j);
  // Parseval: sum |psi_hat|^2 = n sum |psi|^2
  const double scale = grid_.dr() / (static_cast<double>(n) * 2.0 * mass_);
  double e = fft_->kinetic(s.psi1, k2, scale) + fft_->kinetic(s.psi2, k2, scale);
  double pot = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Mat2 v = to_matrix(potential_[j]);
    const cplx a = s.psi1[j], b = s.psi2[j];
    pot += (std::conj(a) * (v(0, 0) * a + v(0, 1) * b) + std::conj(b) * (v(1, 0) * a + v(1, 1) * b))
               .real();
  }
  return e + pot * grid_.dr();
}

SoftObservables observables(const WavepacketState& s, const HybridHamiltonian& h,
                            const SoftPropagator& prop) {
  SoftObservables o;
  const double dr = s.grid.dr();
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    const cplx a = s.psi1[j], b = s.psi2[j];
    o.density(0, 0) += a * std::conj(a);
    o.density(0, 1) += a * std::conj(b);
    o.density(1, 0) += b * std::conj(a);
    o.density(1, 1) += b * std::conj(b);
    const SpectralData sd = spectral(h, s.grid.node(j));
    o.P1 += std::norm(std::conj(sd.v1[0]) * a + std::conj(sd.v1[1]) * b);
    o.P2 += std::norm(std::conj(sd.v2[0]) * a + std::conj(sd.v2[1]) * b);
  }
  o.density = o.density * dr;
  o.P1 *= dr;
  o.P2 *= dr;
  o.norm = norm(s);
  o.purity = (o.density * o.density).trace().real();
  o.energy = prop.energy(s);
  return o;
}

void write_wavefunction(std::ostream& os, const WavepacketState& s) {
  os << "r\tre_psi1\tim_psi1\tre_psi2\tim_psi2\n" << std::setprecision(17);
  for (std::size_t j = 0; j < s.grid.n; ++j)
    os << s.grid.node(j) << '\t' << s.psi1[j].real() << '\t' << s.psi1[j].imag() << '\t'
       << s.psi2[j].real() << '\t' << s.psi2[j].imag() << '\n';
}

}  // namespace koopmon
