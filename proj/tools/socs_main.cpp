// Command-line driver for the semiclassical spin-orbit experiment suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "socs/experiments/config.hpp"
#include "socs/experiments/outputs.hpp"
#include "socs/experiments/runs.hpp"

namespace {

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config '" << config_path << "'\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  try {
    const socs::ExperimentConfig cfg = socs::parse_config(text);
    const std::string dir = !out_dir.empty() ? out_dir
                            : !cfg.out_dir.empty() ? cfg.out_dir
                                                   : std::string("results/") + name;
    const socs::ExperimentOutcome outcome = socs::run_experiment(name, cfg);
    socs::emit_outputs(outcome, socs::config_hash(text), dir);

    for (const auto& c : outcome.criteria) {
      std::printf("%s  %s: measured %.6g", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured);
      if (std::isfinite(c.bound_hi)) std::printf(" (bound %.6g)", c.bound_hi);
      if (!c.note.empty()) std::printf("  [%s]", c.note.c_str());
      std::printf("\n");
    }
    for (const auto& w : outcome.warnings) {
      std::printf("WARN  %s\n", w.c_str());
    }
    std::printf("%s  %s -> %s\n", outcome.pass() ? "PASS" : "FAIL", name.c_str(), dir.c_str());
    return outcome.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical propagation of coherent states with spin-orbit coupling"};
  app.require_subcommand(0, 1);

  bool list_models = false;
  app.add_flag("--list-models", list_models, "Print the built-in model catalog and exit");

  struct Sub {
    CLI::App* cmd = nullptr;
    std::string config;
    std::string out;
  };
  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"exactness", "Quadratic-exactness check (harmonic H0, constant field)"},
      {"scaling-a", "sqrt(hbar) error scaling, scenario A (s fixed)"},
      {"scaling-b", "sqrt(hbar) error scaling, scenario B (hbar s fixed)"},
      {"ehrenfest", "Breakdown-time sweep against the Ehrenfest scale"},
      {"expectation", "Expectation-value tracking along the classical flow"},
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, desc] : kinds) {
    Sub sub;
    sub.cmd = app.add_subcommand(name, desc);
    sub.cmd->add_option("--config", sub.config, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub.cmd->add_option("--out", sub.out, "Output directory");
    subs[name] = std::move(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (list_models) {
    for (const auto& name : socs::builtin_names()) {
      const auto model = socs::builtin({name, {}});
      std::printf("%-22s d=%d  constant_C=%s  quadratic_H0=%s\n", name.c_str(), model->dim(),
                  model->constant_C() ? "yes" : "no", model->quadratic_h0() ? "yes" : "no");
    }
    return 0;
  }

  for (auto& [name, sub] : subs) {
    if (sub.cmd->parsed()) {
      return run_subcommand(name, sub.config, sub.out);
    }
  }
  std::cout << app.help();
  return 0;
}
