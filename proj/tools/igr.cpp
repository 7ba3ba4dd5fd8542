// igr: run experiment presets and the acceptance suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "igr/igr.hpp"

namespace {

int run_command(const std::optional<std::string>& config_file, const std::vector<igr::ConfigEntry>& cli) {
  std::vector<igr::ConfigEntry> file;
  if (config_file) file = igr::read_config_file(*config_file);
  const igr::ResolvedConfig cfg = igr::resolve_config(file, cli);
  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / cfg.preset.name;

  const igr::PresetOutcome out = igr::run_preset(cfg.preset, {dir});
  for (const auto& r : out.runs) {
    std::printf("%-12s %-9s n=%-5d alpha=%-12s ", r.plan.label.c_str(), igr::to_string(r.config.scheme), r.plan.n,
                igr::format_number(r.config.flux.alpha).c_str());
    if (r.result.completed()) {
      std::printf("t=%s steps=%ld\n", igr::format_number(r.result.final.t).c_str(), r.result.stats.steps);
    } else {
      std::printf("stopped at t=%s: %s\n", igr::format_number(r.result.failure->time).c_str(),
                  r.result.failure->cause.c_str());
    }
  }
  for (const auto& [alpha, rows] : out.trajectories) {
    std::printf("trajectories alpha=%s rows=%zu\n", igr::format_number(alpha).c_str(), rows.size());
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int verify_command(const std::string& json_path, const std::vector<int>& only, const std::optional<std::string>& artifacts,
                   bool sequential) {
  igr::AcceptanceOptions opt;
  opt.only.insert(only.begin(), only.end());
  opt.parallel = !sequential;
  if (artifacts) opt.artifacts = *artifacts;
  const igr::AcceptanceReport report = igr::run_acceptance(opt, [](const igr::CriterionResult& c) {
    std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.detail.c_str(), c.seconds);
    std::fflush(stdout);
  });
  std::ofstream os = igr::open_for_writing(json_path);
  os << report.to_json().dump(2) << '\n';
  std::printf("%s; summary in %s\n", report.all_passed() ? "all checks passed" : "some checks failed",
              json_path.c_str());
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information geometric regularization experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment preset");
  std::string preset;
  std::optional<std::string> config_file, out_dir, scheme, scaling;
  std::optional<int> n;
  std::optional<double> alpha, a, gamma, cfl, t_end;
  run->add_option("--preset", preset, "preset name")->check(CLI::IsMember(igr::preset_names()));
  run->add_option("--n", n, "cells per axis");
  run->add_option("--alpha", alpha, "regularization strength at the chosen n");
  run->add_option("--alpha-scaling", scaling, "quadratic or fixed");
  run->add_option("--scheme", scheme, "lf, lw, lw-igr or mixed-igr");
  run->add_option("--a", a, "pressure coefficient");
  run->add_option("--gamma", gamma, "adiabatic exponent");
  run->add_option("--cfl", cfl, "CFL number");
  run->add_option("--t-end", t_end, "final time");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::string json_path = "acceptance.json";
  std::vector<int> only;
  std::optional<std::string> artifacts;
  bool sequential = false;
  verify->add_option("--json", json_path, "where to write the JSON summary");
  verify->add_option("--only", only, "criterion numbers to run (default: all)")->check(CLI::Range(1, 9));
  verify->add_option("--artifacts", artifacts, "write preset outputs below this directory");
  verify->add_flag("--sequential", sequential, "run preset solvers one after another");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<igr::ConfigEntry> cli;
      auto put = [&](const char* key, const std::string& v) { cli.push_back({key, v, 0}); };
      auto num = [](double v) { return igr::format_number(v); };
      if (!preset.empty()) put("preset", preset);
      if (n) put("n", std::to_string(*n));
      if (alpha) put("alpha", num(*alpha));
      if (scaling) put("alpha-scaling", *scaling);
      if (scheme) put("scheme", *scheme);
      if (a) put("a", num(*a));
      if (gamma) put("gamma", num(*gamma));
      if (cfl) put("cfl", num(*cfl));
      if (t_end) put("t-end", num(*t_end));
      if (out_dir) put("out", *out_dir);
      return run_command(config_file, cli);
    }
    return verify_command(json_path, only, artifacts, sequential);
  } catch (const igr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
