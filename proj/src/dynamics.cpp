#include "koopmon/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "koopmon/errors.hpp"

namespace koopmon {

namespace {

const cplx kI{0.0, 1.0};

bool coupled(Method m, const ParticleEnsemble& e) {
  // A single koopmon has no partner to couple to; skipping the term keeps it
  // bit-identical to Ehrenfest.
  if (m == Method::koopmon) return e.size() > 1;
  return m == Method::bohmion;
}

/// Mean-field part: gradients of sum_a w_a Tr(rho_a H(q_a, p_a)).
CouplingGradient mean_field(const ParticleEnsemble& e, const HybridHamiltonian& h) {
  const std::size_t n = e.size();
  CouplingGradient g;
  g.dq.resize(n);
  g.dp.resize(n);
  g.drho.resize(n);
  std::vector<double> per(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t aa = 0; aa < static_cast<std::ptrdiff_t>(n); ++aa) {
    const std::size_t a = static_cast<std::size_t>(aa);
    const PauliVector r = to_pauli(e.rho[a]);
    const PauliVector H = h(e.q[a], e.p[a]);
    per[a] = e.w[a] * trace_product(r, H);
    g.dq[a] = e.w[a] * trace_product(r, h.grad_q(e.q[a], e.p[a]));
    g.dp[a] = e.w[a] * trace_product(r, h.grad_p(e.q[a], e.p[a]));
    g.drho[a] = H * e.w[a];
  }
  for (double x : per) g.energy += x;
  return g;
}

CouplingGradient coupling(Method m, const ParticleEnsemble& e, const HybridHamiltonian& h,
                          const KernelSpec& spec, const QuadratureGrid& grid, bool with_gradient) {
  if (m == Method::koopmon) return koopmon_coupling(e, h, grid, spec, with_gradient);
  return bohmion_coupling(e, h.mass(), grid.q, spec, with_gradient);
}

void check_finite(const EnsembleDerivative& d) {
  for (std::size_t a = 0; a < d.dq.size(); ++a) {
    bool ok = std::isfinite(d.dq[a]) && std::isfinite(d.dp[a]);
    for (const cplx& z : d.drho[a].m) ok = ok && std::isfinite(z.real()) && std::isfinite(z.imag());
    if (!ok) {
      std::ostringstream msg;
      msg << "non-finite time derivative for particle " << a;
      throw NonFiniteError(msg.str());
    }
  }
}

ParticleEnsemble axpy(const ParticleEnsemble& e, const EnsembleDerivative& d, double s) {
  ParticleEnsemble out = e;
  for (std::size_t a = 0; a < e.size(); ++a) {
    out.q[a] += s * d.dq[a];
    out.p[a] += s * d.dp[a];
    out.rho[a] += d.drho[a] * s;
  }
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::koopmon: return "koopmon";
    case Method::ehrenfest: return "ehrenfest";
    case Method::bohmion: return "bohmion";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "koopmon") return Method::koopmon;
  if (name == "ehrenfest") return Method::ehrenfest;
  if (name == "bohmion") return Method::bohmion;
  throw ConfigError("unknown particle method '" + std::string(name) + "'");
}

QuadratureGrid method_grid(Method method, const ParticleEnsemble& e, const CouplingSetup& setup) {
  if (!coupled(method, e)) return {};
  if (method == Method::bohmion)
    return {build_midpoint_axis(e.q, setup.kernel.sigma(), setup.grid.n_q, setup.grid.j_q), GridAxis{}};
  return build_grid(e, setup.kernel, setup.grid);
}

EnsembleDerivative rhs(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                       const KernelSpec& spec, const QuadratureGrid& grid) {
  CouplingGradient g = mean_field(e, h);
  if (coupled(method, e)) {
    const CouplingGradient c = coupling(method, e, h, spec, grid, true);
    for (std::size_t a = 0; a < e.size(); ++a) {
      g.dq[a] += c.dq[a];
      g.dp[a] += c.dp[a];
      g.drho[a] += c.drho[a];
    }
  }
  const std::size_t n = e.size();
  EnsembleDerivative d{std::vector<double>(n), std::vector<double>(n),
                       std::vector<DensityMatrix2>(n)};
  for (std::size_t a = 0; a < n; ++a) {
    const double inv = 1.0 / e.w[a];
    d.dq[a] = inv * g.dp[a];
    d.dp[a] = -inv * g.dq[a];
    d.drho[a] = commutator(to_matrix(g.drho[a]), e.rho[a]) * (-kI * inv);
  }
  check_finite(d);
  return d;
}

EnsembleDerivative rhs(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                       const CouplingSetup& setup) {
  return rhs(method, e, h, setup.kernel, method_grid(method, e, setup));
}

double energy(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
              const KernelSpec& spec, const QuadratureGrid& grid) {
  double total = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a)
    total += e.w[a] * trace_product(to_pauli(e.rho[a]), h(e.q[a], e.p[a]));
  if (coupled(method, e)) total += coupling(method, e, h, spec, grid, false).energy;
  if (!std::isfinite(total)) throw NonFiniteError("non-finite ensemble energy");
  return total;
}

double energy(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
              const CouplingSetup& setup) {
  return energy(method, e, h, setup.kernel, method_grid(method, e, setup));
}

ParticleEnsemble rk4_step(const EnsembleField& f, const ParticleEnsemble& e, double dt) {
  const EnsembleDerivative k1 = f(e);
  const EnsembleDerivative k2 = f(axpy(e, k1, 0.5 * dt));
  const EnsembleDerivative k3 = f(axpy(e, k2, 0.5 * dt));
  const EnsembleDerivative k4 = f(axpy(e, k3, dt));
  ParticleEnsemble out = e;
  const double s = dt / 6.0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    out.q[a] += s * (k1.dq[a] + 2.0 * k2.dq[a] + 2.0 * k3.dq[a] + k4.dq[a]);
    out.p[a] += s * (k1.dp[a] + 2.0 * k2.dp[a] + 2.0 * k3.dp[a] + k4.dp[a]);
    out.rho[a] += (k1.drho[a] + k2.drho[a] * 2.0 + k3.drho[a] * 2.0 + k4.drho[a]) * s;
  }
  rehermitize(out.rho);
  return out;
}

ParticleEnsemble rk4_step(Method method, const ParticleEnsemble& e, const HybridHamiltonian& h,
                          const CouplingSetup& setup, double dt) {
  return rk4_step([&](const ParticleEnsemble& s) { return rhs(method, s, h, setup); }, e, dt);
}

long nearest_step(double t, double dt) {
  return static_cast<long>(std::ceil(t / dt - 0.5 - 1e-9));
}

long step_count(double t_final, double dt) {
  return std::max(0L, static_cast<long>(std::llround(t_final / dt)));
}

double relative_drift(double h, double h0) {
  const double scale = std::abs(h0);
  return scale > 1e-300 ? std::abs(h - h0) / scale : std::abs(h - h0);
}

PropagationResult propagate(Method method, const ParticleEnsemble& e0, const HybridHamiltonian& h,
                            const CouplingSetup& setup, const PropagationSettings& settings,
                            const PropagationObserver& observer) {
  if (!(settings.dt > 0.0)) throw SolverError("time step must be positive");
  const long steps = step_count(settings.t_final, settings.dt);

  std::vector<std::pair<long, double>> snaps;
  for (double t : settings.snapshot_times) {
    if (t < 0.0 || t > settings.t_final + 1e-9)
      throw SolverError("snapshot time outside [0, t_final]");
    snaps.emplace_back(std::min(nearest_step(t, settings.dt), steps), t);
  }

  PropagationResult res;
  res.final_state = e0;
  res.initial_energy = energy(method, e0, h, setup);

  auto report = [&](long step, const ParticleEnsemble& e, double en) {
    const double t = static_cast<double>(step) * settings.dt;
    DiagnosticsRecord r = particle_diagnostics(e, h);
    r.t = t;
    r.energy = en;
    r.energy_drift_rel = relative_drift(en, res.initial_energy);
    res.max_drift = std::max(res.max_drift, r.energy_drift_rel);
    if (observer.on_record) observer.on_record(r);
    if (observer.on_step) observer.on_step(step, t, e);
    if (observer.on_snapshot)
      for (const auto& [s, treq] : snaps)
        if (s == step) observer.on_snapshot(treq, t, e);
    if (r.energy_drift_rel > settings.abort_factor * settings.drift_tolerance) {
      std::ostringstream msg;
      msg << "relative energy drift " << r.energy_drift_rel << " at t=" << t << " exceeds "
          << settings.abort_factor << " x tolerance " << settings.drift_tolerance;
      throw EnergyDriftError(msg.str());
    }
  };

  report(0, res.final_state, res.initial_energy);
  for (long s = 1; s <= steps; ++s) {
    res.final_state = rk4_step(method, res.final_state, h, setup, settings.dt);
    res.steps = s;
    report(s, res.final_state, energy(method, res.final_state, h, setup));
  }
  return res;
}

}  // namespace koopmon
