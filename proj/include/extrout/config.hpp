#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "extrout/protocols.hpp"
#include "extrout/topology.hpp"
#include "extrout/variant.hpp"

namespace extrout {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct KSetting {
  int ks = 2;
  int kd = 2;
  bool operator==(const KSetting&) const = default;
};

struct SweepConfig {
  std::vector<int> l_targets{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<KSetting> k_settings{{2, 2}, {2, 3}};
  std::vector<int> duplicates{1, 2, 3, 4, 5};
  std::vector<int> fakes{1};
  std::vector<int> nfakes{1, 2, 3, 4, 5};
  int pairs_per_length = 10;
  int fixed_l = 12;
};

// Resolved experiment configuration. Config files are YAML with the sections
// topology, scenario, run, attack and sweep; every key `section.name` can be
// overridden by the flag `--section.name`.
struct ExperimentConfig {
  TopologyParams topology;  // seed is derived per repetition from `seed`
  ProtocolVariant variant;
  ScenarioParams scenario{3, 4};
  std::optional<std::uint32_t> source;  // explicit S, else random with target_l
  std::optional<std::uint32_t> dest;
  int target_l = 8;
  bool full_extension = true;  // reject plans whose extension or decoys fell short

  int reps = 20;
  std::uint64_t seed = 1;
  std::string out = "out";
  int reseed_limit = 200;
  int pairs_per_topology = 64;
  int attack_draws = 200;

  int trials = 5000;
  int trial_budget = 100;

  SweepConfig sweep;

  void validate() const;
};

// Dotted key names in a fixed order.
const std::vector<std::string>& config_keys();

// Throws ConfigError for unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                   int line = 0);

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

// key=value for every key, in config_keys() order.
std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& cfg);
std::vector<std::string> provenance(const ExperimentConfig& cfg, std::string_view command);

}  // namespace extrout
