#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "extrout/config.hpp"
#include "extrout/experiment.hpp"

namespace {

// "duplicates(2)" or "duplicates".
void apply_variant(extrout::ExperimentConfig& cfg, const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) {
    extrout::apply_setting(cfg, "scenario.variant", text);
    return;
  }
  if (text.back() != ')')
    throw extrout::ConfigError(fmt::format("--variant: malformed '{}'", text));
  extrout::apply_setting(cfg, "scenario.variant", text.substr(0, open));
  extrout::apply_setting(cfg, "scenario.count", text.substr(open + 1, text.size() - open - 2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Route-extrapolation privacy simulator"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> seed, reps, out, variant, trials;
  app.add_option("--config", config_path, "YAML config file");
  app.add_option("--seed", seed, "root seed (run.seed)");
  app.add_option("--reps", reps, "repetitions (run.reps)");
  app.add_option("--out", out, "output directory (run.out)");
  app.add_option("--variant", variant, "no_privacy|baseline|duplicates(n)|fake(f)|nfake(n)");
  app.add_option("--trials", trials, "attack trials (attack.trials)");

  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& key : extrout::config_keys())
    app.add_option("--" + key, overrides[key], "override " + key)->group("Config keys");

  auto* topology = app.add_subcommand("topology", "generate a topology file and degree report");
  auto* run = app.add_subcommand("run", "repeated runs, matrix, heatmap and privacy report");
  auto* sweep = app.add_subcommand("sweep", "anonymity_vs_L.csv and anonymity_vs_tof.csv");
  auto* attack = app.add_subcommand("attack", "empirical attack trials against a fixed pair");
  auto* report = app.add_subcommand("report", "reconcile reference configurations, analyse traces");
  extrout::ReportInputs inputs;
  report->add_option("--trace", inputs.trace, "node counts CSV to analyse");
  report->add_option("--links", inputs.links, "link counts CSV for --trace");
  report->add_option("--topology", inputs.topology, "topology file for --trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    extrout::ExperimentConfig cfg =
        config_path.empty() ? extrout::ExperimentConfig{} : extrout::load_config(config_path);
    for (const auto& key : extrout::config_keys())
      if (const auto& v = overrides[key]) extrout::apply_setting(cfg, key, *v);
    if (seed) extrout::apply_setting(cfg, "run.seed", *seed);
    if (reps) extrout::apply_setting(cfg, "run.reps", *reps);
    if (out) extrout::apply_setting(cfg, "run.out", *out);
    if (trials) extrout::apply_setting(cfg, "attack.trials", *trials);
    if (variant) apply_variant(cfg, *variant);
    cfg.validate();

    if (*topology) return extrout::cmd_topology(cfg, std::cout);
    if (*run) return extrout::cmd_run(cfg, std::cout);
    if (*sweep) return extrout::cmd_sweep(cfg, std::cout);
    if (*attack) return extrout::cmd_attack(cfg, std::cout);
    if (*report) return extrout::cmd_report(cfg, inputs, std::cout);
  } catch (const extrout::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
