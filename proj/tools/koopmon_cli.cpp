#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <iostream>

#include "koopmon/config.hpp"
#include "koopmon/errors.hpp"
#include "koopmon/runner.hpp"

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw koopmon::ConfigError("--set expects key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized mixed quantum-classical dynamics: koopmons, Ehrenfest, bohmions, SOFT"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a configuration or preset");
  std::string config_path, preset, method, out_dir = "run";
  std::vector<std::string> sets;
  int workers = 0;
  run->add_option("config", config_path, "INI configuration file");
  run->add_option("--preset", preset, "Built-in preset");
  run->add_option("--method", method, "koopmon | ehrenfest | bohmion | soft");
  run->add_option("--set", sets, "Override key=value")->take_all();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker threads (default: all cores)");

  auto* cmp = app.add_subcommand("compare", "Compare completed runs of one model");
  std::vector<std::string> dirs;
  cmp->add_option("dirs", dirs, "Run directories")->required()->expected(2, -1);

  auto* list = app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*list) {
      for (const auto& p : koopmon::presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*cmp) {
      std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
      koopmon::print_comparison(std::cout, koopmon::compare(paths));
      return 0;
    }
    koopmon::ConfigSource src;
    if (!config_path.empty()) src.path = config_path;
    if (!preset.empty()) src.preset = preset;
    if (!method.empty()) src.method = method;
    for (const auto& s : sets) src.sets.push_back(split_assignment(s));
    const koopmon::RunConfig cfg = koopmon::resolve_config(src);
    if (workers > 0) omp_set_num_threads(workers);

    const koopmon::RunOutcome res = koopmon::run(cfg, out_dir);
    if (res.exit_code != 0) {
      std::cerr << "solver error: " << res.error << "\n";
      return res.exit_code;
    }
    const auto& r = res.final_record;
    std::cout << "t=" << r.t << " P1=" << r.P1 << " purity=" << r.purity
              << " max_drift=" << res.max_drift << "\n";
    return 0;
  } catch (const koopmon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const koopmon::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
}
