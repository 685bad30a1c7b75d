#include "koopmon/runner.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <optional>
#include <sstream>

#include "koopmon/dynamics.hpp"
#include "koopmon/errors.hpp"
#include "koopmon/sampling.hpp"
#include "koopmon/soft.hpp"

#ifndef KOOPMON_VERSION
#define KOOPMON_VERSION "unknown"
#endif

namespace koopmon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string time_tag(double t) {
  std::ostringstream os;
  os << std::setprecision(10) << t;
  return os.str();
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream os(file);
  if (!os) throw SolverError("cannot write " + file.string());
  os << std::setprecision(17);
  return os;
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream os(file);
  if (!os) throw SolverError("cannot write " + file.string());
  os << j.dump(2) << "\n";
}

json record_json(const DiagnosticsRecord& r) {
  return {{"t", r.t},
          {"P1", r.P1},
          {"P2", r.P2},
          {"purity", r.purity},
          {"bloch", {r.bloch.x, r.bloch.y, r.bloch.z}},
          {"energy", r.energy},
          {"energy_drift", r.energy_drift_rel}};
}

/// Axis of `count` nodes spanning [lo, hi].
GridAxis span_axis(double lo, double hi, std::size_t count) {
  GridAxis a;
  a.count = std::max<std::size_t>(count, 2);
  a.min = lo;
  a.step = (hi - lo) / static_cast<double>(a.count - 1);
  return a;
}

/// Extent of the entries of `v` above rel * max(v), as (first, last) index.
std::pair<std::size_t, std::size_t> support(const std::vector<double>& v, double rel) {
  const double peak = *std::max_element(v.begin(), v.end());
  std::size_t lo = v.size(), hi = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= rel * peak) continue;
    lo = std::min(lo, i);
    hi = i;
  }
  if (lo > hi) return {0, v.size() - 1};
  return {lo, hi};
}

/// Phase-space window holding the wavepacket: configuration and momentum
/// supports padded by 4 sigma of the visualization kernel.
std::array<double, 4> wavepacket_window(const WavepacketState& s, double delta) {
  const std::size_t n = s.grid.n;
  std::vector<double> rho_r(n), rho_k(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) rho_r[j] = std::norm(s.psi1[j]) + std::norm(s.psi2[j]);

  std::vector<cplx> buf(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  for (const auto* psi : {&s.psi1, &s.psi2}) {
    buf = *psi;
    fftw_execute(plan);
    for (std::size_t j = 0; j < n; ++j) rho_k[j] += std::norm(buf[j]);
  }
  fftw_destroy_plan(plan);

  // Reorder momenta ascending: k = -n/2 .. n/2-1.
  std::vector<double> sorted(n), ks(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + n / 2) % n;
    sorted[i] = rho_k[j];
    ks[i] = s.grid.k(j);
  }
  const double pad = 4.0 * delta / std::sqrt(2.0);
  const auto [qa, qb] = support(rho_r, 1e-8);
  const auto [pa, pb] = support(sorted, 1e-8);
  return {s.grid.node(qa) - pad, s.grid.node(qb) + pad, ks[pa] - pad, ks[pb] + pad};
}

void write_field(const fs::path& file, const DensityField& f) {
  auto os = open_out(file);
  write_density_field(os, f);
}

struct WaterfallWriter {
  std::ofstream os;
  double interval = 0.0;
  long stride = 0;

  WaterfallWriter(const fs::path& file, double interval_, double dt, const GridAxis& r)
      : interval(interval_) {
    if (interval <= 0.0) return;
    stride = std::max(1L, static_cast<long>(std::llround(interval / dt)));
    os = open_out(file);
    os << "# r_min " << r.min << "\n# r_step " << r.step << "\n# r_count " << r.count << "\n";
  }
  bool due(long step) const { return stride > 0 && step % stride == 0; }
  void row(double t, const DensityField& f) {
    os << t;
    for (double v : f.values) os << '\t' << v;
    os << '\n';
  }
};

struct Tracker {
  DiagnosticsRecord last;
  double max_drift = 0.0;
};

void run_particles(const RunConfig& cfg, const fs::path& out, Tracker& tr, json& extra) {
  const HybridHamiltonian h = make_named_model(cfg.model, cfg.model_params);
  const Method method = parse_method(cfg.method);

  InitSpec init;
  init.mu_q = cfg.mu_q;
  init.mu_p = cfg.mu_p;
  init.sigma_q = cfg.sigma_q;
  init.rho0 = projector(initial_spinor(cfg));
  init.n = cfg.n_particles;
  init.sobol_skip = cfg.sobol_skip;
  const ParticleEnsemble e0 = init_ensemble(init);

  CouplingSetup setup{KernelSpec{cfg.alpha}, cfg.grid};
  PropagationSettings ps;
  ps.dt = cfg.dt;
  ps.t_final = cfg.t_final;
  ps.snapshot_times = cfg.snapshot_times;
  ps.drift_tolerance = cfg.drift_tolerance;

  auto ts = open_out(out / "timeseries.tsv");
  write_timeseries_header(ts);

  const double sig = cfg.delta / std::sqrt(2.0);
  const bool have_r = cfg.soft_grid.r_max > cfg.soft_grid.r_min;
  const GridAxis r_axis =
      have_r ? span_axis(cfg.soft_grid.r_min, cfg.soft_grid.r_max, 2 * cfg.field_nodes)
             : span_axis(cfg.mu_q - 50.0, cfg.mu_q + 50.0, 2 * cfg.field_nodes);
  WaterfallWriter wf(out / "waterfall.tsv", cfg.waterfall_interval, cfg.dt, r_axis);

  PropagationObserver obs;
  obs.on_record = [&](const DiagnosticsRecord& r) {
    write_timeseries_row(ts, r);
    tr.last = r;
    tr.max_drift = std::max(tr.max_drift, r.energy_drift_rel);
  };
  obs.on_step = [&](long step, double t, const ParticleEnsemble& e) {
    if (wf.due(step)) wf.row(t, waterfall_slice(e, cfg.delta, r_axis));
  };
  obs.on_snapshot = [&](double treq, double t, const ParticleEnsemble& e) {
    const std::string tag = time_tag(treq);
    {
      auto os = open_out(out / "snapshots" / ("ensemble_t" + tag + ".tsv"));
      write_snapshot(os, e);
    }
    const auto [qlo, qhi] = std::minmax_element(e.q.begin(), e.q.end());
    const auto [plo, phi] = std::minmax_element(e.p.begin(), e.p.end());
    const double pad = 4.0 * sig;
    const GridAxis qa = span_axis(*qlo - pad, *qhi + pad, cfg.field_nodes);
    const GridAxis pa = span_axis(*plo - pad, *phi + pad, cfg.field_nodes);
    write_field(out / "snapshots" / ("cloud_t" + tag + ".tsv"),
                smoothed_cloud(e, cfg.delta, qa, pa));
    extra["snapshots"].push_back({{"requested", treq}, {"actual", t}});
  };

  const PropagationResult res = propagate(method, e0, h, setup, ps, obs);
  auto os = open_out(out / "final_ensemble.tsv");
  write_snapshot(os, res.final_state);
  extra["steps"] = res.steps;
}

void run_soft(const RunConfig& cfg, const fs::path& out, Tracker& tr, json& extra) {
  const HybridHamiltonian h = make_named_model(cfg.model, cfg.model_params);
  const SoftPropagator prop(cfg.soft_grid, h, cfg.soft_dt);
  WavepacketState s =
      init_wavepacket(cfg.soft_grid, cfg.mu_q, cfg.mu_p, cfg.sigma_q, initial_spinor(cfg));

  const long steps = step_count(cfg.t_final, cfg.soft_dt);
  std::multimap<long, double> snaps;
  for (double t : cfg.snapshot_times)
    snaps.emplace(std::min(nearest_step(t, cfg.soft_dt), steps), t);

  auto ts = open_out(out / "timeseries.tsv");
  write_timeseries_header(ts);
  const SpatialGrid1D& g = cfg.soft_grid;
  GridAxis r_axis = span_axis(g.r_min, g.r_max - g.dr(), g.n);
  WaterfallWriter wf(out / "waterfall.tsv", cfg.waterfall_interval, cfg.soft_dt, r_axis);

  double e0 = 0.0, norm_drift = 0.0;
  const double edge = 0.05 * (g.r_max - g.r_min);
  double edge_mass = 0.0;
  for (long step = 0; step <= steps; ++step) {
    if (step > 0) prop.step(s);
    s.t = static_cast<double>(step) * cfg.soft_dt;
    const SoftObservables o = observables(s, h, prop);
    if (!std::isfinite(o.norm) || !std::isfinite(o.energy))
      throw NonFiniteError("non-finite wavefunction at t=" + time_tag(s.t));
    if (step == 0) e0 = o.energy;
    DiagnosticsRecord r = soft_diagnostics(o, s.t);
    r.energy_drift_rel = relative_drift(o.energy, e0);
    write_timeseries_row(ts, r);
    tr.last = r;
    tr.max_drift = std::max(tr.max_drift, r.energy_drift_rel);
    norm_drift = std::max(norm_drift, std::abs(o.norm - 1.0));
    edge_mass = std::max(edge_mass, boundary_mass(s, edge));

    if (wf.due(step)) wf.row(s.t, waterfall_slice(s));
    const auto range = snaps.equal_range(step);
    for (auto it = range.first; it != range.second; ++it) {
      const std::string tag = time_tag(it->second);
      {
        auto os = open_out(out / "snapshots" / ("wavefunction_t" + tag + ".tsv"));
        write_wavefunction(os, s);
      }
      const auto w = wavepacket_window(s, cfg.delta);
      write_field(out / "snapshots" / ("wigner_t" + tag + ".tsv"),
                  wigner_window(s, w[0], w[1], w[2], w[3], cfg.field_nodes));
      extra["snapshots"].push_back({{"requested", it->second}, {"actual", s.t}});
    }
  }
  extra["steps"] = steps;
  extra["norm_drift_max"] = norm_drift;
  extra["boundary_mass_max"] = edge_mass;
  if (edge_mass > 1e-10) extra["warnings"].push_back("wavefunction reached the grid boundary");
}

}  // namespace

std::string code_version() { return KOOPMON_VERSION; }

RunOutcome run(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out / "snapshots");
  json manifest;
  manifest["code_version"] = code_version();
  manifest["config"] = cfg.resolved;
  manifest["model"] = cfg.model;
  manifest["method"] = cfg.method;
  manifest["status"] = "running";
  write_json(out / "manifest.json", manifest);

  const auto start = std::chrono::steady_clock::now();
  Tracker tr;
  json extra = json::object();
  RunOutcome outcome;
  try {
    if (cfg.particle_method())
      run_particles(cfg, out, tr, extra);
    else
      run_soft(cfg, out, tr, extra);
    manifest["status"] = "complete";
  } catch (const SolverError& e) {
    outcome.exit_code = 2;
    outcome.error = e.what();
    manifest["status"] = "partial";
    manifest["error"] = e.what();
  }
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["run"] = extra;
  write_json(out / "manifest.json", manifest);

  json summary = record_json(tr.last);
  summary["model"] = cfg.model;
  summary["method"] = cfg.method;
  summary["status"] = manifest["status"];
  summary["energy_drift_max"] = tr.max_drift;
  summary["drift_within_tolerance"] = tr.max_drift < cfg.drift_tolerance;
  for (const char* k : {"norm_drift_max", "boundary_mass_max"})
    if (extra.contains(k)) summary[k] = extra[k];
  write_json(out / "summary.json", summary);

  outcome.final_record = tr.last;
  outcome.max_drift = tr.max_drift;
  return outcome;
}

std::vector<DiagnosticsRecord> read_timeseries(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot read " + file.string());
  std::vector<DiagnosticsRecord> out;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    DiagnosticsRecord r;
    ls >> r.t >> r.P1 >> r.P2 >> r.purity >> r.bloch.x >> r.bloch.y >> r.bloch.z >> r.energy >>
        r.energy_drift_rel;
    if (!ls) throw ConfigError("malformed time-series row in " + file.string());
    out.push_back(r);
  }
  return out;
}

namespace {

json read_manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw ConfigError("no manifest in " + dir.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("bad manifest in " + dir.string() + ": " + e.what());
  }
}

std::optional<ParticleEnsemble> final_ensemble(const fs::path& dir) {
  std::ifstream is(dir / "final_ensemble.tsv");
  if (!is) return std::nullopt;
  return read_snapshot(is);
}

}  // namespace

std::vector<RunComparison> compare(const std::vector<fs::path>& dirs) {
  if (dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
  const json ref_manifest = read_manifest(dirs[0]);
  const std::string model = ref_manifest.value("model", "");
  const auto ref = read_timeseries(dirs[0] / "timeseries.tsv");
  const auto ref_ens = final_ensemble(dirs[0]);

  std::vector<RunComparison> rows;
  for (std::size_t i = 1; i < dirs.size(); ++i) {
    const json m = read_manifest(dirs[i]);
    if (m.value("model", "") != model)
      throw ConfigError("incompatible models: " + model + " vs " + m.value("model", ""));
    const auto other = read_timeseries(dirs[i] / "timeseries.tsv");

    RunComparison c;
    c.reference = dirs[0].string();
    c.other = dirs[i].string();
    std::size_t j = 0;
    for (const auto& r : ref) {
      const double tol = 1e-9 * std::max(1.0, std::abs(r.t));
      while (j < other.size() && other[j].t < r.t - tol) ++j;
      if (j == other.size()) break;
      if (std::abs(other[j].t - r.t) > tol) continue;
      const double dP1 = std::abs(other[j].P1 - r.P1);
      const double dpur = std::abs(other[j].purity - r.purity);
      c.max_dP1 = std::max(c.max_dP1, dP1);
      c.max_dpurity = std::max(c.max_dpurity, dpur);
      c.final_dP1 = dP1;
      c.final_dpurity = dpur;
      ++c.aligned_points;
    }

    const auto ens = final_ensemble(dirs[i]);
    if (ref_ens && ens && ref_ens->size() == ens->size()) {
      c.max_dq = 0.0;
      c.max_dp = 0.0;
      for (std::size_t a = 0; a < ens->size(); ++a) {
        c.max_dq = std::max(c.max_dq, std::abs(ens->q[a] - ref_ens->q[a]));
        c.max_dp = std::max(c.max_dp, std::abs(ens->p[a] - ref_ens->p[a]));
      }
    }
    rows.push_back(c);
  }
  return rows;
}

void print_comparison(std::ostream& os, const std::vector<RunComparison>& rows) {
  os << "reference\tother\tpoints\tmax_dP1\tmax_dpurity\tfinal_dP1\tfinal_dpurity\tmax_dq\tmax_dp\n";
  for (const auto& c : rows) {
    os << c.reference << '\t' << c.other << '\t' << c.aligned_points << '\t' << c.max_dP1 << '\t'
       << c.max_dpurity << '\t' << c.final_dP1 << '\t' << c.final_dpurity << '\t';
    if (c.max_dq < 0.0)
      os << "-\t-\n";
    else
      os << c.max_dq << '\t' << c.max_dp << '\n';
  }
}

}  // namespace koopmon
