#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "extrout/config.hpp"
#include "extrout/metrics.hpp"
#include "extrout/protocols.hpp"
#include "extrout/simengine.hpp"
#include "extrout/topology.hpp"
#include "extrout/trials.hpp"

namespace extrout {

class ScenarioSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioInstance {
  std::shared_ptr<const Topology> topology;
  ScenarioPlan plan;
  std::uint64_t topology_seed = 0;
  int attempts = 0;  // topologies generated, including the accepted one
};

struct ScenarioRequest {
  ProtocolVariant variant;
  ScenarioParams params;
  int target_l = 8;
  std::optional<std::uint32_t> source;
  std::optional<std::uint32_t> dest;
};

ScenarioRequest request_from(const ExperimentConfig& cfg);

// Draws topologies with seeds derive_seed(rep_seed, "topology", a) until one
// holds an S-D pair at the target distance (or the explicit pair is reachable)
// whose plan satisfies full_extension. Throws ScenarioSearchError after
// cfg.reseed_limit topologies.
ScenarioInstance find_scenario(const ExperimentConfig& cfg, const ScenarioRequest& req,
                               std::uint64_t rep_seed);

// Reported values of the published configuration with the same accounting, if any.
std::optional<ReportedValues> matching_reference(const PathAccounting& acc);

// Parallel over indices, results land in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// ---- run

struct RepResult {
  ScenarioInstance instance;
  TrafficTrace trace;
  PrivacyReport report;
  Reconciliation reconciliation;
  AttackTrialsResult guesses;
  std::optional<TrafficMatrix> matrix;
};

struct RunResult {
  std::vector<RepResult> reps;
  std::optional<TrafficMatrix> mean;
  bool passed() const;
};

RunResult run_experiment(const ExperimentConfig& cfg);

// ---- sweep

struct SweepRow {
  std::string technique;  // variant key
  int count = 0;
  int L = 0;
  int ks = 0;
  int kd = 0;
  int requested = 0;
  int instances = 0;
  double anonymity_single = 0.0;
  double anonymity_pair = 0.0;
  double tof_analytical = 0.0;
  double tof_measured = 0.0;
  bool reconciled = true;

  bool ok() const { return instances == requested && reconciled; }
  std::string status() const;
};

struct SweepResult {
  std::vector<SweepRow> by_length;  // anonymity_vs_L.csv
  std::vector<SweepRow> frontier;   // anonymity_vs_tof.csv
};

SweepResult sweep_experiment(const ExperimentConfig& cfg);

struct Dominance {
  std::string technique;
  bool dominates = false;
  std::string witness;  // "<extrout point> over <nfake point>"
};

// For each extrapolating technique present: does some point beat some N-fake
// point in anonymity at equal or lower TOF?
std::vector<Dominance> extrout_dominates_nfake(const std::vector<SweepRow>& frontier);

void write_length_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& comments = {});
void write_frontier_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                        const std::vector<std::string>& comments = {});

// ---- attack

struct AttackSummary {
  ScenarioInstance instance;  // the fixed topology and S-D
  AttackTrialsResult result;
  double predicted_source = 0.0;
  double predicted_dest = 0.0;
  double predicted_pair = 0.0;
  bool passed() const;
};

// Same topology and endpoints every trial; the extension and decoys are
// re-drawn per trial.
AttackSummary attack_experiment(const ExperimentConfig& cfg);
std::string to_text(const AttackSummary& s);

// ---- subcommands, returning the process exit code

int cmd_topology(const ExperimentConfig& cfg, std::ostream& log);
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_attack(const ExperimentConfig& cfg, std::ostream& log);

struct ReportInputs {
  std::string trace;     // node counts CSV
  std::string links;     // link counts CSV
  std::string topology;  // topology file
};

int cmd_report(const ExperimentConfig& cfg, const ReportInputs& inputs, std::ostream& log);

}  // namespace extrout
