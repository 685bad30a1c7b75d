#include "koopmon/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "koopmon/errors.hpp"
#include "koopmon/hybrid_models.hpp"

namespace koopmon {

namespace {

using KeyMap = std::map<std::string, std::string>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "preset", "model", "method", "n_particles", "alpha", "dt", "t_final", "snapshot_times",
      "n_q", "n_p", "j_q", "j_p", "delta", "drift_tolerance", "field_nodes", "waterfall_interval",
      "init.mu_q", "init.mu_p", "init.sigma_q", "init.sigma_q_from_momentum", "init.rho0",
      "init.sobol_skip", "soft.r_min", "soft.r_max", "soft.n_points", "soft.dt"};
  return keys;
}

bool is_model_param(const std::string& key) { return key.rfind("model_params.", 0) == 0; }

KeyMap tully_preset(const std::string& model, double mu_q, double mu_p, double t_final,
                    const std::string& snaps, const std::string& rho0) {
  std::ostringstream mq, mp, tf;
  mq << mu_q;
  mp << mu_p;
  tf << t_final;
  return {{"model", model},           {"n_particles", "1000"},
          {"alpha", "0.325"},         {"dt", "2"},
          {"t_final", tf.str()},      {"snapshot_times", snaps},
          {"init.mu_q", mq.str()},    {"init.mu_p", mp.str()},
          {"init.sigma_q_from_momentum", "true"},
          {"init.rho0", rho0},        {"soft.r_min", "-30"},
          {"soft.r_max", "40"},       {"soft.n_points", "4096"},
          {"soft.dt", "1"}};
}

KeyMap rabi_preset(const std::string& model, double mu_p, double t_final,
                   const std::string& snaps) {
  std::ostringstream mp, tf;
  mp << mu_p;
  tf << t_final;
  return {{"model", model},
          {"n_particles", "500"},
          {"alpha", "0.5"},
          {"dt", "0.05"},
          {"t_final", tf.str()},
          {"snapshot_times", snaps},
          {"init.mu_q", "0"},
          {"init.mu_p", mp.str()},
          {"init.sigma_q", "0.70710678118654752"},
          {"init.rho0", "plus"},
          {"soft.r_min", "-15"},
          {"soft.r_max", "15"},
          {"soft.n_points", "2048"},
          {"soft.dt", "0.01"},
          {"waterfall_interval", "0.25"}};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

KeyMap read_ini(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& err) {
    std::ostringstream msg;
    msg << path << ":" << err.line() << ": " << err.message();
    throw ConfigError(msg.str());
  }
  KeyMap out;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      out[key] = trim(node.data());
      continue;
    }
    for (const auto& [sub, leaf] : node) out[key + "." + sub] = trim(leaf.data());
  }
  return out;
}

double to_double(const KeyMap& m, const std::string& key, std::vector<std::string>& bad) {
  const std::string& v = m.at(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad.push_back(key + " (not a number: '" + v + "')");
    return 0.0;
  }
}

long to_long(const KeyMap& m, const std::string& key, std::vector<std::string>& bad) {
  const std::string& v = m.at(key);
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad.push_back(key + " (not an integer: '" + v + "')");
    return 0;
  }
}

bool to_bool(const KeyMap& m, const std::string& key, std::vector<std::string>& bad) {
  const std::string& v = m.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad.push_back(key + " (not a boolean: '" + v + "')");
  return false;
}

std::vector<double> to_list(const KeyMap& m, const std::string& key,
                            std::vector<std::string>& bad) {
  std::vector<double> out;
  std::string v = m.at(key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      bad.push_back(key + " (bad list entry '" + tok + "')");
    }
  }
  return out;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = {
      {"tully1", "Tully I, single avoided crossing; N=1000, alpha=0.325, dt=2, (mu_q,mu_p)=(-8,10)",
       tully_preset("tully1", -8, 10, 3000, "0, 1280, 2130, 3000", "e1")},
      {"tully2", "Tully II, dual avoided crossing; N=1000, alpha=0.325, dt=2, (mu_q,mu_p)=(-8,16)",
       tully_preset("tully2", -8, 16, 2000, "0, 860, 1140, 2000", "e1")},
      {"tully3",
       "Tully III, extended coupling with reflection; N=1000, alpha=0.325, dt=2, "
       "(mu_q,mu_p)=(-15,20), run to t=4000",
       tully_preset("tully3", -15, 20, 4000, "0, 1500, 2000, 3500", "e2")},
      {"rabi_us", "Rabi, ultrastrong coupling (gamma=0.29, C0=0.35); N=500, alpha=0.5, dt=0.05",
       rabi_preset("rabi_us", 4, 25, "0, 10.5, 17.5, 25")},
      {"rabi_ds", "Rabi, deep strong coupling (gamma=1.85, C0=0.1); N=500, alpha=0.5, dt=0.05",
       rabi_preset("rabi_ds", 0, 15, "0, 4, 6, 8, 15")},
  };
  return list;
}

const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}

RunConfig resolve_config(const ConfigSource& src) {
  KeyMap file;
  if (src.path) file = read_ini(*src.path);
  KeyMap sets;
  for (const auto& [k, v] : src.sets) sets[trim(k)] = trim(v);

  std::string preset;
  if (src.preset) preset = *src.preset;
  else if (sets.count("preset")) preset = sets.at("preset");
  else if (file.count("preset")) preset = file.at("preset");

  KeyMap m;
  if (!preset.empty()) m = find_preset(preset).values;
  for (const auto& [k, v] : file) m[k] = v;
  for (const auto& [k, v] : sets) m[k] = v;
  if (src.method) m["method"] = *src.method;
  m.erase("preset");
  // An explicit width replaces a preset's momentum-derived one.
  const auto user_has = [&](const std::string& k) { return file.count(k) || sets.count(k); };
  if (user_has("init.sigma_q") && !user_has("init.sigma_q_from_momentum"))
    m.erase("init.sigma_q_from_momentum");

  std::vector<std::string> unknown;
  for (const auto& [k, v] : m)
    if (!known_keys().count(k) && !is_model_param(k)) unknown.push_back(k);
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  RunConfig cfg;
  cfg.preset = preset;
  std::vector<std::string> missing, bad;
  auto need = [&](const std::string& key) {
    if (!m.count(key)) missing.push_back(key);
    return m.count(key) > 0;
  };

  if (need("model")) cfg.model = m.at("model");
  if (need("method")) cfg.method = m.at("method");
  const bool soft = cfg.method == "soft";
  if (!cfg.method.empty() && cfg.method != "koopmon" && cfg.method != "ehrenfest" &&
      cfg.method != "bohmion" && !soft)
    bad.push_back("method (unknown method '" + cfg.method + "')");

  if (need("t_final")) cfg.t_final = to_double(m, "t_final", bad);
  if (m.count("snapshot_times")) cfg.snapshot_times = to_list(m, "snapshot_times", bad);
  if (need("init.mu_q")) cfg.mu_q = to_double(m, "init.mu_q", bad);
  if (need("init.mu_p")) cfg.mu_p = to_double(m, "init.mu_p", bad);
  const bool from_p = m.count("init.sigma_q_from_momentum") &&
                      to_bool(m, "init.sigma_q_from_momentum", bad);
  if (from_p) {
    if (m.count("init.sigma_q"))
      bad.push_back("init.sigma_q (conflicts with init.sigma_q_from_momentum=true)");
    else if (cfg.mu_p == 0.0)
      bad.push_back("init.sigma_q_from_momentum (needs nonzero init.mu_p)");
    else
      cfg.sigma_q = sigma_q_from_momentum(cfg.mu_p);
  } else if (need("init.sigma_q")) {
    cfg.sigma_q = to_double(m, "init.sigma_q", bad);
  }
  if (m.count("init.rho0")) cfg.rho0 = m.at("init.rho0");
  if (m.count("init.sobol_skip")) {
    const long s = to_long(m, "init.sobol_skip", bad);
    if (s < 1) bad.push_back("init.sobol_skip (must be >= 1)");
    cfg.sobol_skip = static_cast<std::size_t>(std::max(s, 1L));
  }
  if (m.count("delta")) cfg.delta = to_double(m, "delta", bad);
  if (m.count("drift_tolerance")) cfg.drift_tolerance = to_double(m, "drift_tolerance", bad);
  if (m.count("field_nodes")) {
    const long n = to_long(m, "field_nodes", bad);
    if (n < 2) bad.push_back("field_nodes (must be >= 2)");
    cfg.field_nodes = static_cast<std::size_t>(std::max(n, 2L));
  }
  if (m.count("waterfall_interval"))
    cfg.waterfall_interval = to_double(m, "waterfall_interval", bad);

  for (const char* key : {"soft.r_min", "soft.r_max", "soft.n_points", "soft.dt"})
    if (soft) need(key);
  if (m.count("soft.r_min")) cfg.soft_grid.r_min = to_double(m, "soft.r_min", bad);
  if (m.count("soft.r_max")) cfg.soft_grid.r_max = to_double(m, "soft.r_max", bad);
  if (m.count("soft.n_points"))
    cfg.soft_grid.n = static_cast<std::size_t>(std::max(to_long(m, "soft.n_points", bad), 0L));
  if (m.count("soft.dt")) cfg.soft_dt = to_double(m, "soft.dt", bad);
  if (soft) {
    if (m.count("soft.dt") && cfg.soft_dt <= 0.0) bad.push_back("soft.dt (must be positive)");
    try {
      if (missing.empty()) cfg.soft_grid.validate();
    } catch (const ConfigError& e) {
      bad.push_back(std::string("soft grid (") + e.what() + ")");
    }
  } else {
    if (need("n_particles")) {
      const long n = to_long(m, "n_particles", bad);
      if (n < 1) bad.push_back("n_particles (must be >= 1)");
      cfg.n_particles = static_cast<std::size_t>(std::max(n, 0L));
    }
    if (need("alpha")) cfg.alpha = to_double(m, "alpha", bad);
    if (need("dt")) cfg.dt = to_double(m, "dt", bad);
    for (const char* key : {"n_q", "n_p", "j_q", "j_p"}) {
      if (!m.count(key)) continue;
      const long v = to_long(m, key, bad);
      if (v < 1) bad.push_back(std::string(key) + " (must be >= 1)");
      const int iv = static_cast<int>(std::max(v, 1L));
      if (std::string(key) == "n_q") cfg.grid.n_q = iv;
      if (std::string(key) == "n_p") cfg.grid.n_p = iv;
      if (std::string(key) == "j_q") cfg.grid.j_q = iv;
      if (std::string(key) == "j_p") cfg.grid.j_p = iv;
    }
    if (m.count("alpha") && cfg.alpha <= 0.0) bad.push_back("alpha (must be positive)");
    if (m.count("dt") && cfg.dt <= 0.0) bad.push_back("dt (must be positive)");
  }
  if (m.count("t_final") && cfg.t_final < 0.0) bad.push_back("t_final (must be >= 0)");
  if (cfg.sigma_q <= 0.0 && missing.empty()) bad.push_back("init.sigma_q (must be positive)");
  if (cfg.delta <= 0.0) bad.push_back("delta (must be positive)");
  if (cfg.drift_tolerance <= 0.0) bad.push_back("drift_tolerance (must be positive)");
  if (cfg.waterfall_interval < 0.0) bad.push_back("waterfall_interval (must be >= 0)");
  for (double t : cfg.snapshot_times)
    if (t < 0.0 || t > cfg.t_final + 1e-9) bad.push_back("snapshot_times (outside [0, t_final])");
  static const std::set<std::string> spinors = {"e1", "e2", "plus", "ground", "excited"};
  if (!spinors.count(cfg.rho0)) bad.push_back("init.rho0 (unknown state '" + cfg.rho0 + "')");

  for (const auto& [k, v] : m) {
    if (!is_model_param(k)) continue;
    cfg.model_params[k.substr(std::string("model_params.").size())] = to_double(m, k, bad);
  }
  if (!cfg.model.empty() && missing.empty() && bad.empty()) {
    try {
      make_named_model(cfg.model, cfg.model_params);
    } catch (const ConfigError& e) {
      bad.push_back(std::string("model (") + e.what() + ")");
    }
  }

  if (!missing.empty() || !bad.empty()) {
    std::string msg = "invalid configuration:";
    if (!missing.empty()) {
      msg += " missing keys:";
      for (const auto& k : missing) msg += " " + k;
      msg += ";";
    }
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg);
  }
  cfg.resolved = m;
  if (!preset.empty()) cfg.resolved["preset"] = preset;
  return cfg;
}

RunConfig load_config(const std::string& path) { return resolve_config({path, {}, {}, {}}); }

std::array<cplx, 2> initial_spinor(const RunConfig& cfg) {
  if (cfg.rho0 == "e1") return {cplx{1.0}, cplx{0.0}};
  if (cfg.rho0 == "e2") return {cplx{0.0}, cplx{1.0}};
  if (cfg.rho0 == "plus") {
    const double s = 1.0 / std::sqrt(2.0);
    return {cplx{s}, cplx{s}};
  }
  const SpectralData sd = spectral(make_named_model(cfg.model, cfg.model_params), cfg.mu_q);
  if (cfg.rho0 == "ground") return sd.v1;
  if (cfg.rho0 == "excited") return sd.v2;
  throw ConfigError("unknown initial state '" + cfg.rho0 + "'");
}

}  // namespace koopmon
