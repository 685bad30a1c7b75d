// Acceptance suite: one PASS/FAIL line per criterion.

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "koopmon/backreaction.hpp"
#include "koopmon/config.hpp"
#include "koopmon/diagnostics.hpp"
#include "koopmon/dynamics.hpp"
#include "koopmon/runner.hpp"
#include "koopmon/sampling.hpp"
#include "koopmon/soft.hpp"
#include "test_util.hpp"
#include "twodof_fixtures.hpp"

using namespace koopmon;
using namespace koopmon::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(),
              v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "koopmon_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunConfig config(const std::string& preset, const std::string& method,
                 std::vector<std::pair<std::string, std::string>> sets = {}) {
  ConfigSource src;
  src.preset = preset;
  src.method = method;
  src.sets = std::move(sets);
  return resolve_config(src);
}

struct DeskRun {
  RunOutcome outcome;
  std::vector<DiagnosticsRecord> series;
  fs::path dir;
  double seconds = 0.0;
};

/// Desk-scale runs are shared between criteria.
std::map<std::string, DeskRun>& cache() {
  static std::map<std::string, DeskRun> runs;
  return runs;
}

const DeskRun& desk_run(const std::string& key, const RunConfig& cfg) {
  auto it = cache().find(key);
  if (it != cache().end()) return it->second;
  DeskRun r;
  r.dir = workdir() / key;
  const auto t0 = std::chrono::steady_clock::now();
  r.outcome = run(cfg, r.dir);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.series = read_timeseries(r.dir / "timeseries.tsv");
  return cache().emplace(key, std::move(r)).first->second;
}

std::vector<std::pair<std::string, std::string>> desk_sets(const std::string& preset) {
  const bool tully = preset.rfind("tully", 0) == 0;
  return {{"n_particles", tully ? "200" : "100"}, {"field_nodes", "64"}};
}

const std::vector<std::string> kPresets = {"tully1", "tully2", "tully3", "rabi_us", "rabi_ds"};

double record_at(const std::vector<DiagnosticsRecord>& s, double t,
                 double DiagnosticsRecord::*field) {
  const auto it = std::min_element(s.begin(), s.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.t - t) < std::abs(b.t - t);
  });
  return (*it).*field;
}

double min_until(const std::vector<DiagnosticsRecord>& s, double t,
                 double DiagnosticsRecord::*field) {
  double m = 1e300;
  for (const auto& r : s)
    if (r.t <= t + 1e-9) m = std::min(m, r.*field);
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double mean_position(const WavepacketState& s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j)
    acc += s.grid.node(j) * (std::norm(s.psi1[j]) + std::norm(s.psi2[j]));
  return acc * s.grid.dr();
}

/// <p> by a direct discrete Fourier transform.
double mean_momentum(const WavepacketState& s) {
  const std::size_t n = s.grid.n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto* psi : {&s.psi1, &s.psi2}) {
      cplx c{};
      for (std::size_t j = 0; j < n; ++j)
        c += (*psi)[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j % n) / double(n));
      num += s.grid.k(k) * std::norm(c);
      den += std::norm(c);
    }
  }
  return num / den;
}

HybridHamiltonian classical_only() {
  return HybridHamiltonian(
      "classical", 2000.0, [](double q, double p) { return p * p / 4000.0 + 0.01 * std::tanh(q); },
      [](double q, double) { return 0.01 / std::pow(std::cosh(q), 2); },
      [](double, double p) { return p / 2000.0; }, [](double) { return PauliVector{}; },
      [](double) { return PauliVector{}; }, true);
}

HybridHamiltonian quantum_only() {
  return HybridHamiltonian(
      "quantum", 1.0, [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [](double) { return PauliVector{0.2, 0.35, -0.1, 0.4}; },
      [](double) { return PauliVector{}; }, true);
}

double max_component(const PauliVector& v) {
  return std::max({std::abs(v.h0), std::abs(v.h1), std::abs(v.h2), std::abs(v.h3)});
}

Ensemble2D two_by_two() {
  const Ensemble2D full = ensemble_2dof();
  Ensemble2D e;
  e.q1 = {full.q1[0], full.q1[1]};
  e.p1 = {full.p1[0], full.p1[1]};
  e.w1 = {0.4, 0.6};
  e.q2 = full.q2;
  e.p2 = full.p2;
  e.w2 = full.w2;
  e.rho = {full.rho[0], full.rho[1], full.rho[2], full.rho[3]};
  return e;
}

}  // namespace

int main() {
  const CouplingSetup setup{KernelSpec{0.5}, GridParams{}};

  report(1, "gradient structure", [&] {
    double worst = 0.0;
    for (Method m : {Method::ehrenfest, Method::koopmon, Method::bohmion})
      for (const auto& [h, e] : {std::pair{make_tully(TullyVariant::I), tully_four()},
                                std::pair{make_rabi(RabiRegime::ultrastrong), rabi_four()}})
        worst = std::max(worst, check_gradient(m, e, h, setup).worst());
    return Verdict{worst < 1e-5, "worst relative error " + fmt(worst) + " (< 1e-5)"};
  });

  report(2, "structural invariants", [&] {
    double anti = 0.0, diag = 0.0, sym = 0.0, zero = 0.0;
    for (const auto& [h, e] : {std::pair{make_tully(TullyVariant::I), tully_four()},
                              std::pair{make_rabi(RabiRegime::ultrastrong), rabi_four()}}) {
      const QuadratureGrid g = build_grid(e, setup.kernel, setup.grid);
      const auto t = koopmon_pairs(e, h, g, setup.kernel);
      const auto b = bohmion_pairs(e, g.q, setup.kernel);
      for (std::size_t a = 0; a < e.size(); ++a) {
        diag = std::max(diag, max_component(t(a, a)));
        for (std::size_t c = 0; c < e.size(); ++c) {
          anti = std::max(anti, max_component(t(a, c) + t(c, a)));
          sym = std::max(sym, std::abs(b(a, c) - b(c, a)));
        }
      }
    }
    for (const HybridHamiltonian& h : {classical_only(), quantum_only()})
      for (const ParticleEnsemble& e : {tully_four(), rabi_four()}) {
        const QuadratureGrid g = build_grid(e, setup.kernel, setup.grid);
        const CouplingGradient c = koopmon_coupling(e, h, g, setup.kernel);
        zero = std::max(zero, std::abs(koopmon_coupling_energy(e, koopmon_pairs(e, h, g, setup.kernel))));
        zero = std::max(zero, std::abs(c.energy));
        for (std::size_t a = 0; a < e.size(); ++a)
          zero = std::max({zero, std::abs(c.dq[a]), std::abs(c.dp[a]), max_component(c.drho[a])});
      }
    const bool ok = anti == 0.0 && diag == 0.0 && sym == 0.0 && zero < 1e-12;
    return Verdict{ok, "antisymmetry " + fmt(anti) + ", diagonal " + fmt(diag) + ", symmetry " +
                           fmt(sym) + ", classical/quantum-only coupling " + fmt(zero) +
                           " (< 1e-12)"};
  });

  report(3, "limit recoveries", [&] {
    const auto h = make_tully(TullyVariant::I);
    const RunConfig cfg = config("tully1", "koopmon");
    InitSpec s;
    s.mu_q = cfg.mu_q;
    s.mu_p = cfg.mu_p;
    s.sigma_q = cfg.sigma_q;
    s.rho0 = projector(initial_spinor(cfg));

    // (a) one koopmon against one Ehrenfest trajectory, bit for bit
    s.n = 1;
    ParticleEnsemble k1 = init_ensemble(s), e1 = k1;
    bool identical = true;
    for (int step = 0; step < 500; ++step) {
      k1 = rk4_step(Method::koopmon, k1, h, CouplingSetup{KernelSpec{0.325}, GridParams{}}, 2.0);
      e1 = rk4_step(Method::ehrenfest, e1, h, CouplingSetup{KernelSpec{0.325}, GridParams{}}, 2.0);
      identical = identical && k1.q == e1.q && k1.p == e1.p && max_abs(k1.rho[0] - e1.rho[0]) == 0.0;
    }

    // (b) wide kernel against Ehrenfest, N = 50, t in [0, 200]
    s.n = 50;
    const CouplingSetup wide{KernelSpec{8.0}, GridParams{}};
    ParticleEnsemble k = init_ensemble(s), e = k;
    double dq = 0.0, dp = 0.0;
    for (int step = 0; step < 100; ++step) {
      k = rk4_step(Method::koopmon, k, h, wide, 2.0);
      e = rk4_step(Method::ehrenfest, e, h, wide, 2.0);
      for (std::size_t a = 0; a < k.size(); ++a) {
        dq = std::max(dq, std::abs(k.q[a] - e.q[a]));
        dp = std::max(dp, std::abs(k.p[a] - e.p[a]));
      }
    }
    const bool ok = identical && dq < 1e-3 && dp < 1e-3;
    return Verdict{ok, std::string("N=1 koopmon == Ehrenfest bitwise: ") +
                           (identical ? "yes" : "no") + "; alpha=8 max |dq| " + fmt(dq) +
                           ", max |dp| " + fmt(dp) + " (< 1e-3)"};
  });

  report(4, "energy conservation", [&] {
    // drift at the benchmark sizes, runtime at desk sizes
    double worst = 0.0, desk_worst = 0.0, slowest = 0.0;
    std::string where, failed;
    for (const std::string& p : kPresets)
      for (const char* m : {"koopmon", "ehrenfest", "bohmion"}) {
        const DeskRun& full = desk_run(p + "_" + m + "_full", config(p, m, {{"field_nodes", "64"}}));
        const DeskRun& r = desk_run(p + "_" + m, config(p, m, desk_sets(p)));
        if (full.outcome.exit_code != 0) failed += " " + p + "/" + m;
        if (full.outcome.max_drift > worst) {
          worst = full.outcome.max_drift;
          where = p + "/" + m;
        }
        desk_worst = std::max(desk_worst, r.outcome.max_drift);
        slowest = std::max(slowest, r.seconds);
      }
    const bool ok = failed.empty() && worst < 1e-2 && slowest < 1800.0;
    return Verdict{ok, "worst relative drift " + fmt(worst) + " (" + where + ", < 1e-2)" +
                           ", slowest desk run " + fmt(slowest) + " s (< 1800)" +
                           ", desk-size worst drift " + fmt(desk_worst) +
                           (failed.empty() ? "" : ", solver errors:" + failed)};
  });

  report(5, "SOFT correctness", [&] {
    double norm_drift = 0.0;
    for (const std::string& p : kPresets) {
      const DeskRun& r = desk_run(p + "_soft", config(p, "soft", {{"field_nodes", "64"}}));
      std::ifstream is(r.dir / "summary.json");
      norm_drift = std::max(norm_drift, nlohmann::json::parse(is).at("norm_drift_max").get<double>());
    }

    // coherent state in a unit harmonic well, one period
    const HybridHamiltonian osc = make_rabi(RabiParams{0.0, 0.0, 1.0, 1.0, "harmonic"});
    const SpatialGrid1D g{-15.0, 15.0, 2048};
    const int steps = 628;
    const SoftPropagator prop(g, osc, 2.0 * std::numbers::pi / steps);
    const std::array<cplx, 2> e1 = {cplx{1.0}, cplx{0.0}};
    WavepacketState s = init_wavepacket(g, 0.0, 4.0, 1.0 / std::sqrt(2.0), e1);
    for (int k = 0; k < steps; ++k) prop.step(s);
    const double ret = std::hypot(mean_position(s), mean_momentum(s) - 4.0);

    // two-level Rabi period pi / C0
    const double c0 = 0.35;
    const HybridHamiltonian spin(
        "spin", 1.0, [](double, double p) { return 0.5 * p * p; },
        [](double, double) { return 0.0; }, [](double, double p) { return p; },
        [c0](double) { return PauliVector{0, c0, 0, 0}; }, [](double) { return PauliVector{}; },
        true);
    const SpatialGrid1D gs{-15.0, 15.0, 512};
    const SoftPropagator ps(gs, spin, 0.01);
    WavepacketState w = init_wavepacket(gs, 0.0, 0.0, 1.0, e1);
    std::vector<double> r11;
    for (int k = 0; k <= 600; ++k) {
      r11.push_back(observables(w, spin, ps).density(0, 0).real());
      ps.step(w);
    }
    std::size_t m = 1;
    while (!(r11[m] <= r11[m - 1] && r11[m] <= r11[m + 1])) ++m;
    const double y0 = r11[m - 1], y1 = r11[m], y2 = r11[m + 1];
    const double t_min = 0.01 * (static_cast<double>(m) + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2));
    const double period_err = std::abs(2.0 * t_min / (std::numbers::pi / c0) - 1.0);

    const bool ok = norm_drift < 1e-9 && ret < 1e-3 && period_err < 1e-3;
    return Verdict{ok, "norm drift " + fmt(norm_drift) + " (< 1e-9), harmonic phase-space return " +
                           fmt(ret) + " (< 1e-3), Rabi period error " + fmt(period_err) +
                           " (< 1e-3)"};
  });

  report(6, "Wigner analytics", [&] {
    const SpatialGrid1D g{-15.0, 15.0, 2048};
    const double mq = 0.7, mp = -1.5, sq = 0.8;
    const double gamma = 1.0 / (2.0 * sq * sq);
    const WavepacketState s = init_wavepacket(g, mq, mp, sq, {cplx{0.6}, cplx{0.0, 0.8}});
    const DensityField w = wigner(s);
    double worst = 0.0, qmarg = 0.0, pmarg = 0.0;
    std::vector<double> pcol(w.y.count, 0.0);
    for (std::size_t i = 0; i < w.x.count; ++i) {
      const double q = w.x.node(i);
      double row = 0.0;
      for (std::size_t k = 0; k < w.y.count; ++k) {
        const double p = w.y.node(k);
        const double exact = std::exp(-gamma * (q - mq) * (q - mq) - (p - mp) * (p - mp) / gamma) /
                             std::numbers::pi;
        worst = std::max(worst, std::abs(w.at(i, k) - exact));
        row += w.at(i, k) * w.y.step;
        pcol[k] += w.at(i, k) * w.x.step;
      }
      qmarg = std::max(qmarg, std::abs(row - (std::norm(s.psi1[i]) + std::norm(s.psi2[i]))));
    }
    for (std::size_t k = 0; k < w.y.count; ++k) {
      const double p = w.y.node(k);
      const double exact = std::exp(-(p - mp) * (p - mp) / gamma) / std::sqrt(std::numbers::pi * gamma);
      pmarg = std::max(pmarg, std::abs(pcol[k] - exact));
    }
    const bool ok = worst < 1e-6 && qmarg < 1e-6 && pmarg < 1e-6;
    return Verdict{ok, "closed form " + fmt(worst) + ", position marginal " + fmt(qmarg) +
                           ", momentum marginal " + fmt(pmarg) + " (all < 1e-6)"};
  });

  report(7, "factorization equivalence", [&] {
    const FactorizedHamiltonian2D h = model_2dof();
    const Ensemble2D e = two_by_two();
    const KernelSpec k{0.5};
    const auto kt = koopmon_pairs_factorized_2dof(e, h, k, GridParams{});
    const double kf = koopmon_pairing_2dof(e, kt);
    const double kb = koopmon_pairing_bruteforce(e, h, k, kt.grid1, kt.grid2);
    const auto bt = bohmion_pairs_factorized_2dof(e, k, GridParams{});
    const double bf = bohmion_pairing_2dof(e, bt);
    const double bb = bohmion_pairing_bruteforce(e, k, bt.axis1, bt.axis2);
    const bool ok = std::abs(kf - kb) < 1e-5 && std::abs(bf - bb) < 1e-5 && std::abs(kb) > 1e-6;
    return Verdict{ok, "koopmon |factorized - 4D| " + fmt(std::abs(kf - kb)) + " (value " +
                           fmt(kb) + "), bohmion |factorized - 2D| " + fmt(std::abs(bf - bb)) +
                           " (value " + fmt(bb) + "), both < 1e-5"};
  });

  report(8, "benchmark physics", [&] {
    const DeskRun& soft = desk_run("tully1_soft", config("tully1", "soft", {{"field_nodes", "64"}}));
    const DeskRun& k1 = desk_run("tully1_koopmon_a05",
                                 config("tully1", "koopmon",
                                        {{"n_particles", "200"}, {"alpha", "0.5"}, {"field_nodes", "64"}}));
    const double t_end = 3000.0;
    const double dP1 = std::abs(record_at(k1.series, t_end, &DiagnosticsRecord::P1) -
                                record_at(soft.series, t_end, &DiagnosticsRecord::P1));
    const double dpur = std::abs(record_at(k1.series, t_end, &DiagnosticsRecord::purity) -
                                 record_at(soft.series, t_end, &DiagnosticsRecord::purity));

    const DeskRun& k3 = desk_run("tully3_koopmon", config("tully3", "koopmon", desk_sets("tully3")));
    const DeskRun& e3 =
        desk_run("tully3_ehrenfest", config("tully3", "ehrenfest", desk_sets("tully3")));
    const double t_rev = 3500.0;
    const double rise_k = record_at(k3.series, t_rev, &DiagnosticsRecord::purity) -
                          min_until(k3.series, t_rev, &DiagnosticsRecord::purity);
    const double rise_e = record_at(e3.series, t_rev, &DiagnosticsRecord::purity) -
                          min_until(e3.series, t_rev, &DiagnosticsRecord::purity);
    const bool ok = dP1 < 0.1 && dpur < 0.1 && rise_k > 0.02 && rise_e < 0.01;
    return Verdict{ok, "Tully I |dP1| " + fmt(dP1) + " (< 0.1), |dpurity| " + fmt(dpur) +
                           " (< 0.1); Tully III purity rise koopmon " + fmt(rise_k) +
                           " (> 0.02), Ehrenfest " + fmt(rise_e) + " (< 0.01)"};
  });

  report(9, "determinism", [&] {
    const int cores = std::max(omp_get_num_procs(), 4);
    std::string mismatched;
    for (const auto& [preset, method] :
         {std::pair{"tully1", "koopmon"}, std::pair{"rabi_us", "bohmion"}, std::pair{"rabi_us", "soft"}}) {
      const RunConfig cfg =
          config(preset, method, {{"n_particles", "60"}, {"t_final", preset[0] == 't' ? "200" : "5"},
                                  {"snapshot_times", "0"}, {"field_nodes", "32"}});
      std::string ref;
      for (int threads : {1, 2, cores}) {
        omp_set_num_threads(threads);
        const fs::path d = workdir() / ("det_" + std::string(method) + "_" + std::to_string(threads));
        run(cfg, d);
        const std::string ts = slurp(d / "timeseries.tsv") + slurp(d / "final_ensemble.tsv");
        if (ref.empty()) ref = ts;
        else if (ts != ref) mismatched += " " + std::string(method) + "@" + std::to_string(threads);
      }
    }
    omp_set_num_threads(omp_get_num_procs());
    return Verdict{mismatched.empty(), mismatched.empty()
                                           ? "bit-identical outputs with 1, 2 and " +
                                                 std::to_string(cores) + " threads"
                                           : "differences:" + mismatched};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
