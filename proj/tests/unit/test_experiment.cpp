#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "extrout/config.hpp"
#include "extrout/experiment.hpp"

using namespace extrout;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.starts_with("#")) out += line + "\n";
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("extrout_test_" + name);
  fs::remove_all(p);
  return p;
}

int error_line(const std::string& yaml) {
  try {
    parse_config(yaml).validate();
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

ExperimentConfig quick() {
  ExperimentConfig cfg;
  cfg.scenario.packet_budget = 700;
  cfg.attack_draws = 20;
  return cfg;
}

}  // namespace

TEST_CASE("config: sections, lists and overrides") {
  const auto cfg = parse_config(
      "topology:\n  rows: 5\n  cols: 6\n  range: 200\n"
      "scenario:\n  variant: duplicates\n  count: 2\n  ks: random\n"
      "run:\n  reps: 3\n  seed: 9\n"
      "sweep:\n  l_targets: [3, 5]\n  k_settings: \"2:2,3:4\"\n");
  CHECK(cfg.topology.grid_rows == 5);
  CHECK(cfg.topology.grid_cols == 6);
  CHECK(cfg.topology.range == 200);
  CHECK(cfg.variant.kind == VariantKind::kExtroutDuplicates);
  CHECK(cfg.variant.count == 2);
  CHECK_FALSE(cfg.scenario.ks.has_value());
  CHECK(cfg.scenario.kd == 4);
  CHECK(cfg.reps == 3);
  CHECK(cfg.seed == 9);
  CHECK(cfg.sweep.l_targets == std::vector<int>{3, 5});
  CHECK(cfg.sweep.k_settings == std::vector<KSetting>{{2, 2}, {3, 4}});

  ExperimentConfig over = cfg;
  apply_setting(over, "run.reps", "7");
  apply_setting(over, "scenario.strict", "off");
  CHECK(over.reps == 7);
  CHECK_FALSE(over.scenario.strict);
}

TEST_CASE("config errors carry the line") {
  CHECK(error_line("topology:\n  rows: 5\n  bogus: 3\n") == 3);
  CHECK(error_line("run:\n  reps: abc\n") == 2);
  CHECK(error_line("run:\n  reps: 0\n") == 0);
  CHECK(error_line("run: [1, 2]\n") == 1);
  CHECK(error_line("scenario:\n  source: 3\n") == 0);
  CHECK(error_line("topology:\n  rows: 2\n  perturbation: 3\n") == 0);
  try {
    parse_config("topology:\n  bogus: 1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown key 'topology.bogus'") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "scenario.variant", "onion"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "sweep.k_settings", "2-2"), ConfigError);
}

TEST_CASE("resolved settings re-parse to the same config") {
  ExperimentConfig cfg;
  apply_setting(cfg, "scenario.variant", "fake");
  apply_setting(cfg, "scenario.count", "2");
  apply_setting(cfg, "topology.range", "240");
  apply_setting(cfg, "sweep.nfakes", "1,3");
  std::map<std::string, std::string> sections;
  for (const auto& [key, value] : resolved_settings(cfg)) {
    const auto dot = key.find('.');
    sections[key.substr(0, dot)] += "  " + key.substr(dot + 1) + ": \"" + value + "\"\n";
  }
  std::string yaml;
  for (const auto& [name, body] : sections) yaml += name + ":\n" + body;
  CHECK(resolved_settings(parse_config(yaml)) == resolved_settings(cfg));

  const auto prov = provenance(cfg, "run");
  CHECK(prov[0] == "extrout run");
  CHECK(prov[1] == "root_seed=1");
  CHECK(prov.size() == 2 + config_keys().size());
}

TEST_CASE("3x3 unperturbed topology matches the golden file, reruns are byte-identical") {
  ExperimentConfig cfg;
  cfg.topology.grid_rows = cfg.topology.grid_cols = 3;
  cfg.topology.perturbation = 0;
  cfg.seed = 42;
  std::ostringstream log;
  cfg.out = scratch("topo_a").string();
  REQUIRE(cmd_topology(cfg, log) == 0);
  const std::string a = slurp(fs::path(cfg.out) / "topology.txt");
  CHECK(without_comments(a) == without_comments(slurp(EXTROUT_TEST_DATA "/topology_3x3_p0_seed42.txt")));
  CHECK(a.find("# root_seed=42") != std::string::npos);

  const std::string first = cfg.out;
  cfg.out = scratch("topo_b").string();
  REQUIRE(cmd_topology(cfg, log) == 0);
  CHECK(without_comments(slurp(fs::path(cfg.out) / "topology.txt")) == without_comments(a));
  CHECK(slurp(fs::path(cfg.out) / "degree_report.txt").size() > 0);
  fs::remove_all(first);
  fs::remove_all(cfg.out);
}

TEST_CASE("run: reps are independent and the mean matrix is their mean") {
  ExperimentConfig cfg = quick();
  cfg.reps = 3;
  const RunResult r = run_experiment(cfg);
  REQUIRE(r.reps.size() == 3);
  CHECK(r.passed());
  REQUIRE(r.mean.has_value());
  std::vector<TrafficMatrix> ms;
  for (const auto& rep : r.reps) {
    REQUIRE(rep.matrix.has_value());
    ms.push_back(*rep.matrix);
    CHECK(rep.report.tof_analytical == 1.875);
    CHECK(rep.report.tof_measured == 1.875);
    CHECK(rep.instance.plan.L() == 8);
  }
  CHECK(*r.mean == mean_matrix(ms));
  CHECK(r.reps[0].instance.topology_seed != r.reps[1].instance.topology_seed);

  ExperimentConfig one = cfg;
  one.reps = 1;
  const RunResult s = run_experiment(one);
  CHECK(s.reps[0].trace == r.reps[0].trace);
  CHECK(s.reps[0].instance.plan.main->route == r.reps[0].instance.plan.main->route);
  CHECK(*s.mean == *r.reps[0].matrix);
}

TEST_CASE("run with explicit endpoints") {
  ExperimentConfig cfg = quick();
  cfg.topology = lattice_params(20, 20);
  cfg.source = 206;  // (10, 5)
  cfg.dest = 214;    // (10, 13)
  cfg.reps = 1;
  const RunResult r = run_experiment(cfg);
  CHECK(r.passed());
  CHECK(r.reps[0].instance.plan.main->route.hops() == 15);
}

TEST_CASE("impossible target distance exhausts the reseed budget") {
  ExperimentConfig cfg = quick();
  cfg.topology.grid_rows = cfg.topology.grid_cols = 3;
  cfg.target_l = 30;
  cfg.reseed_limit = 3;
  CHECK_THROWS_AS(find_scenario(cfg, request_from(cfg), 1), ScenarioSearchError);
  std::ostringstream log;
  cfg.out = scratch("impossible").string();
  CHECK(cmd_run(cfg, log) == 1);
  fs::remove_all(cfg.out);
}

TEST_CASE("sweep columns follow the closed forms exactly") {
  ExperimentConfig cfg = quick();
  cfg.topology.range = 240;
  cfg.sweep.l_targets = {4, 7};
  cfg.sweep.k_settings = {{2, 2}};
  cfg.sweep.duplicates = {1};
  cfg.sweep.fakes = {1};
  cfg.sweep.nfakes = {1, 5};
  cfg.sweep.pairs_per_length = 3;
  cfg.sweep.fixed_l = 6;
  const SweepResult s = sweep_experiment(cfg);
  REQUIRE(s.by_length.size() == 2);
  for (const auto& row : s.by_length) {
    CHECK(row.ok());
    CHECK(row.anonymity_single == 1.0 - 1.0 / (row.L + 4));
    CHECK(row.tof_analytical == static_cast<double>(row.L + 4) / row.L);
    CHECK(row.tof_measured == row.tof_analytical);
  }
  REQUIRE(s.frontier.size() == 6);
  CHECK(s.frontier[0].technique == "no_privacy");
  CHECK(s.frontier[0].anonymity_single == 0.0);
  CHECK(s.frontier[0].tof_measured == 1.0);
  for (const auto& row : s.frontier) CHECK(row.ok());
  const auto dom = extrout_dominates_nfake(s.frontier);
  REQUIRE(dom.size() == 3);
  for (const auto& d : dom) CHECK_MESSAGE(d.dominates, d.technique);

  std::ostringstream csv;
  write_length_csv(csv, s.by_length, {"c"});
  CHECK(csv.str().find("L,ks,kd,instances,anonymity_single") != std::string::npos);
}

TEST_CASE("dominance needs equal or lower TOF") {
  SweepRow e, f;
  e.technique = "baseline";
  e.instances = f.instances = 1;
  e.anonymity_single = 0.9;
  e.tof_measured = 3.0;
  f.technique = "nfake";
  f.anonymity_single = 0.5;
  f.tof_measured = 2.0;
  CHECK_FALSE(extrout_dominates_nfake({e, f})[0].dominates);
  e.tof_measured = 2.0;
  CHECK(extrout_dominates_nfake({e, f})[0].dominates);
}

TEST_CASE("attack experiment needs enough trials") {
  ExperimentConfig cfg = quick();
  cfg.trials = 10;
  CHECK_THROWS_AS(attack_experiment(cfg), ConfigError);
}

TEST_CASE("report reconciles the published cases and a saved trace") {
  ExperimentConfig cfg = quick();
  cfg.reps = 1;
  cfg.out = scratch("report_run").string();
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, log) == 0);
  const fs::path dir = cfg.out;

  ExperimentConfig rep = cfg;
  rep.out = scratch("report_out").string();
  ReportInputs in{(dir / "trace_rep0.csv").string(), (dir / "trace_links_rep0.csv").string(),
                  (dir / "topology_rep0.txt").string()};
  CHECK(cmd_report(rep, in, log) == 0);
  const std::string text = slurp(fs::path(rep.out) / "reference_reconciliation.txt");
  CHECK(text.find("[trace analysis]") != std::string::npos);
  const std::string csv = slurp(fs::path(rep.out) / "reference_reconciliation.csv");
  CHECK(csv.find("extended_fake_path") != std::string::npos);
  fs::remove_all(dir);
  fs::remove_all(rep.out);
}
