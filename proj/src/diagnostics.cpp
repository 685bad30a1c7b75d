#include "koopmon/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace koopmon {

Vec3 bloch_vector(const Mat2& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

double purity_from_bloch(const Vec3& b) { return 0.5 * (1.0 + dot(b, b)); }

DiagnosticsRecord particle_diagnostics(const ParticleEnsemble& e, const HybridHamiltonian& h) {
  DiagnosticsRecord r;
  for (std::size_t a = 0; a < e.size(); ++a) {
    const SpectralData sd = spectral(h, e.q[a]);
    const Mat2& rho = e.rho[a];
    auto expect = [&](const std::array<cplx, 2>& v) {
      cplx acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += std::conj(v[i]) * rho(i, j) * v[j];
      return acc.real();
    };
    r.P1 += e.w[a] * expect(sd.v1);
    r.P2 += e.w[a] * expect(sd.v2);
  }
  const Mat2 agg = aggregate_density(e);
  r.purity = purity(agg);
  r.bloch = bloch_vector(agg);
  return r;
}

DiagnosticsRecord soft_diagnostics(const SoftObservables& o, double t) {
  DiagnosticsRecord r;
  r.t = t;
  r.P1 = o.P1;
  r.P2 = o.P2;
  r.purity = o.purity;
  r.bloch = bloch_vector(o.density);
  r.energy = o.energy;
  return r;
}

void write_timeseries_header(std::ostream& os) {
  os << "t\tP1\tP2\tpurity\tbx\tby\tbz\tenergy\tdrift\n";
}

void write_timeseries_row(std::ostream& os, const DiagnosticsRecord& r) {
  os << std::setprecision(17) << r.t << '\t' << r.P1 << '\t' << r.P2 << '\t' << r.purity << '\t'
     << r.bloch.x << '\t' << r.bloch.y << '\t' << r.bloch.z << '\t' << r.energy << '\t'
     << r.energy_drift_rel << '\n';
}

double DensityField::integral() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * x.step * (y.count > 1 ? y.step : 1.0);
}

namespace {

/// Wigner columns for the given spatial indices over all native momenta,
/// stored with k = -n/2 first.
std::vector<double> wigner_rows(const WavepacketState& s, const std::vector<std::size_t>& rows) {
  const std::size_t n = s.grid.n;
  const double dr = s.grid.dr();
  std::vector<double> out(rows.size() * n, 0.0);
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  cplx* d = reinterpret_cast<cplx*>(buf);
  const long half = static_cast<long>(n / 2);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const long j = static_cast<long>(rows[r]);
    for (const auto* psi : {&s.psi1, &s.psi2}) {
      std::fill(d, d + n, cplx{});
      for (long m = -half; m < half; ++m) {
        const long up = j + m, down = j - m;
        if (up < 0 || down < 0 || up >= static_cast<long>(n) || down >= static_cast<long>(n))
          continue;
        d[(m + static_cast<long>(n)) % static_cast<long>(n)] =
            std::conj((*psi)[up]) * (*psi)[down];
      }
      // sum_m f_m exp(+2 pi i k m / n) with p_k = pi k / (n dr)
      fftw_execute(plan);
      for (std::size_t kk = 0; kk < n; ++kk) {
        const std::size_t k = (kk + n / 2) % n;  // output column kk <-> k - n/2
        out[r * n + kk] += d[k].real() * dr / std::numbers::pi;
      }
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return out;
}

}  // namespace

DensityField wigner(const WavepacketState& s, std::size_t q_stride) {
  q_stride = std::max<std::size_t>(q_stride, 1);
  const std::size_t n = s.grid.n;
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < n; j += q_stride) rows.push_back(j);
  DensityField f;
  f.kind = "wigner";
  f.x = {s.grid.r_min, s.grid.dr() * static_cast<double>(q_stride), rows.size()};
  const double dp = std::numbers::pi / (static_cast<double>(n) * s.grid.dr());
  f.y = {-static_cast<double>(n / 2) * dp, dp, n};
  f.values = wigner_rows(s, rows);
  return f;
}

DensityField wigner_window(const WavepacketState& s, double q_lo, double q_hi, double p_lo,
                           double p_hi, std::size_t max_nodes) {
  const std::size_t n = s.grid.n;
  const double dr = s.grid.dr();
  const double dp = std::numbers::pi / (static_cast<double>(n) * dr);
  auto clamp_index = [n](double x) {
    return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(n - 1)));
  };
  const std::size_t j0 = clamp_index(std::ceil((q_lo - s.grid.r_min) / dr));
  const std::size_t j1 = clamp_index(std::floor((q_hi - s.grid.r_min) / dr));
  const double pmin = -static_cast<double>(n / 2) * dp;
  const std::size_t k0 = clamp_index(std::ceil((p_lo - pmin) / dp));
  const std::size_t k1 = clamp_index(std::floor((p_hi - pmin) / dp));
  max_nodes = std::max<std::size_t>(max_nodes, 2);
  const std::size_t qs = std::max<std::size_t>(1, (j1 - j0) / (max_nodes - 1) + 1);
  const std::size_t ps = std::max<std::size_t>(1, (k1 - k0) / (max_nodes - 1) + 1);

  std::vector<std::size_t> rows;
  for (std::size_t j = j0; j <= j1; j += qs) rows.push_back(j);
  const std::vector<double> full = wigner_rows(s, rows);

  DensityField f;
  f.kind = "wigner";
  f.x = {s.grid.node(j0), dr * static_cast<double>(qs), rows.size()};
  std::vector<std::size_t> cols;
  for (std::size_t k = k0; k <= k1; k += ps) cols.push_back(k);
  f.y = {pmin + static_cast<double>(k0) * dp, dp * static_cast<double>(ps), cols.size()};
  f.values.resize(rows.size() * cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) f.at(r, c) = full[r * n + cols[c]];
  return f;
}

DensityField smoothed_cloud(const ParticleEnsemble& e, double delta, const GridAxis& q,
                            const GridAxis& p) {
  const KernelSpec k{delta};
  DensityField f;
  f.kind = "smoothed_cloud";
  f.x = q;
  f.y = p;
  f.delta = delta;
  f.values.assign(q.count * p.count, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(q.count); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    for (std::size_t a = 0; a < e.size(); ++a) {
      const double kq = e.w[a] * kernel_1d(k, q.node(i) - e.q[a]);
      if (kq == 0.0) continue;
      for (std::size_t j = 0; j < p.count; ++j) f.at(i, j) += kq * kernel_1d(k, p.node(j) - e.p[a]);
    }
  }
  return f;
}

DensityField waterfall_slice(const ParticleEnsemble& e, double delta, const GridAxis& r) {
  const KernelSpec k{delta};
  DensityField f;
  f.kind = "waterfall";
  f.x = r;
  f.y = {0.0, 1.0, 1};
  f.delta = delta;
  f.values.assign(r.count, 0.0);
  for (std::size_t i = 0; i < r.count; ++i)
    for (std::size_t a = 0; a < e.size(); ++a) f.values[i] += e.w[a] * kernel_1d(k, r.node(i) - e.q[a]);
  return f;
}

DensityField waterfall_slice(const WavepacketState& s) {
  DensityField f;
  f.kind = "waterfall";
  f.x = {s.grid.r_min, s.grid.dr(), s.grid.n};
  f.y = {0.0, 1.0, 1};
  f.values.resize(s.grid.n);
  for (std::size_t j = 0; j < s.grid.n; ++j) f.values[j] = std::norm(s.psi1[j]) + std::norm(s.psi2[j]);
  return f;
}

void write_density_field(std::ostream& os, const DensityField& f) {
  os << std::setprecision(17);
  os << "# kind " << f.kind << '\n';
  os << "# delta " << f.delta << '\n';
  os << "# x_min " << f.x.min << " x_step " << f.x.step << " x_count " << f.x.count << '\n';
  os << "# y_min " << f.y.min << " y_step " << f.y.step << " y_count " << f.y.count << '\n';
  for (std::size_t i = 0; i < f.x.count; ++i) {
    for (std::size_t j = 0; j < f.y.count; ++j) os << (j ? "\t" : "") << f.at(i, j);
    os << '\n';
  }
}

}  // namespace koopmon
