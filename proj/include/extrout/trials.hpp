#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "extrout/adversary.hpp"
#include "extrout/metrics.hpp"
#include "extrout/protocols.hpp"

namespace extrout {

// Builds the scenario of one trial from that trial's seed.
using ScenarioGenerator = std::function<ScenarioPlan(std::uint64_t trial_seed)>;

struct AttackTrialsResult {
  std::vector<AttackVerdict> verdicts;
  EmpiricalRate source;
  EmpiricalRate dest;
  // Real path chosen and its source named.
  EmpiricalRate pair;

  void add(const AttackVerdict& v);
};

// Marks the verdict against the plan's ground truth.
void score(AttackVerdict& verdict, const ScenarioPlan& plan);

// `trials` independent scenario + simulation + attack rounds. Trial i uses the
// seed derive_seed(seed, "trial", i) for its scenario, simulation and attacker.
AttackTrialsResult attack_trials(const ScenarioGenerator& generate, int trials,
                                 std::uint64_t seed, std::uint64_t budget_per_trial);

// Repeated attacker draws against one observed run.
AttackTrialsResult repeated_guesses(const CandidateSets& candidates, const ScenarioPlan& plan,
                                    int draws, Rng& rng);

// `trial,source_guess,dest_guess,correct_s,correct_d`.
void write_verdicts_csv(std::ostream& out, const AttackTrialsResult& result,
                        const std::vector<std::string>& comments = {});

}  // namespace extrout
