#include "koopmon/ensemble.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "koopmon/errors.hpp"

namespace koopmon {

ParticleEnsemble ParticleEnsemble::uniform(std::vector<double> q, std::vector<double> p,
                                           const DensityMatrix2& rho0) {
  ParticleEnsemble e;
  const std::size_t n = q.size();
  e.q = std::move(q);
  e.p = std::move(p);
  e.w.assign(n, 1.0 / static_cast<double>(n));
  e.rho.assign(n, rho0);
  return e;
}

DensityMatrix2 projector(const std::array<cplx, 2>& v) {
  DensityMatrix2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = v[i] * std::conj(v[j]);
  return r;
}

DensityMatrix2 aggregate_density(const ParticleEnsemble& e) {
  DensityMatrix2 r;
  for (std::size_t a = 0; a < e.size(); ++a) r += e.rho[a] * e.w[a];
  return r;
}

double purity(const DensityMatrix2& rho) { return (rho * rho).trace().real(); }

std::vector<Violation> validate(const ParticleEnsemble& e, const ValidationTolerance& tol) {
  std::vector<Violation> out;
  const std::size_t n = e.size();
  if (e.p.size() != n || e.w.size() != n || e.rho.size() != n) {
    out.push_back({n, "array sizes differ", 0.0});
    return out;
  }
  double wsum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!(e.w[a] > 0.0)) out.push_back({a, "non-positive weight", e.w[a]});
    wsum += e.w[a];
  }
  if (std::abs(wsum - 1.0) > tol.weights) out.push_back({n, "weights do not sum to 1", wsum - 1.0});

  for (std::size_t a = 0; a < n; ++a) {
    const DensityMatrix2& r = e.rho[a];
    if (!std::isfinite(e.q[a]) || !std::isfinite(e.p[a]))
      out.push_back({a, "non-finite phase-space point", 0.0});
    const double herm = max_abs(r - r.adjoint());
    if (!(herm <= tol.hermitian)) out.push_back({a, "not Hermitian", herm});
    const cplx tr = r.trace();
    const double tr_err = std::abs(tr - 1.0);
    if (!(tr_err <= tol.trace)) out.push_back({a, "trace differs from 1", tr_err});
    const PauliVector h = to_pauli(r);
    const double lmin = h.h0 - h.norm_vec();
    if (lmin < -tol.eigenvalue) out.push_back({a, "negative eigenvalue", lmin});
  }
  return out;
}

void rehermitize(std::vector<DensityMatrix2>& rho) {
  for (auto& r : rho) {
    r = (r + r.adjoint()) * 0.5;
    const double tr = r.trace().real();
    if (std::abs(tr - 1.0) > 1e-12 && tr != 0.0) r = r * (1.0 / tr);
  }
}

void write_snapshot(std::ostream& os, const ParticleEnsemble& e) {
  os << "index\tq\tp\tw\trho11\tre_rho12\tim_rho12\trho22\n";
  os << std::setprecision(17);
  for (std::size_t a = 0; a < e.size(); ++a) {
    const auto& r = e.rho[a];
    os << a << '\t' << e.q[a] << '\t' << e.p[a] << '\t' << e.w[a] << '\t' << r(0, 0).real()
       << '\t' << r(0, 1).real() << '\t' << r(0, 1).imag() << '\t' << r(1, 1).real() << '\n';
  }
}

ParticleEnsemble read_snapshot(std::istream& is) {
  ParticleEnsemble e;
  std::string line;
  if (!std::getline(is, line)) throw SolverError("empty ensemble snapshot");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t idx;
    double q, p, w, r11, re12, im12, r22;
    if (!(row >> idx >> q >> p >> w >> r11 >> re12 >> im12 >> r22))
      throw SolverError("malformed ensemble snapshot row: " + line);
    e.q.push_back(q);
    e.p.push_back(p);
    e.w.push_back(w);
    DensityMatrix2 r;
    r(0, 0) = r11;
    r(0, 1) = cplx{re12, im12};
    r(1, 0) = cplx{re12, -im12};
    r(1, 1) = r22;
    e.rho.push_back(r);
  }
  return e;
}

}  // namespace koopmon
