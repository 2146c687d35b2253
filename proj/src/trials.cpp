#include "extrout/trials.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "extrout/observe.hpp"
#include "extrout/simengine.hpp"

namespace extrout {

void AttackTrialsResult::add(const AttackVerdict& v) {
  ++source.trials;
  ++dest.trials;
  ++pair.trials;
  source.successes += v.correct_source;
  dest.successes += v.correct_dest;
  pair.successes += v.correct_path && v.correct_source;
  verdicts.push_back(v);
}

void score(AttackVerdict& v, const ScenarioPlan& plan) {
  v.correct_source = v.source_guess && *v.source_guess == plan.source;
  v.correct_dest = v.dest_guess && *v.dest_guess == plan.dest;
  const auto& c = v.chosen_chain;
  const auto s = std::find(c.begin(), c.end(), plan.source);
  v.correct_path = s != c.end() && std::find(s, c.end(), plan.dest) != c.end();
}

AttackTrialsResult attack_trials(const ScenarioGenerator& generate, int trials,
                                 std::uint64_t seed, std::uint64_t budget_per_trial) {
  if (trials < 1) throw std::invalid_argument("attack_trials: trials must be >= 1");
  AttackTrialsResult result;
  result.verdicts.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t trial_seed = derive_seed(seed, "trial", static_cast<std::uint64_t>(i));
    const ScenarioPlan plan = generate(trial_seed);
    const TrafficTrace trace = run(plan, budget_per_trial, trial_seed);
    const AttackerObservation obs = observe(trace, *plan.topology, plan.scheme());
    Rng attacker = Rng::stream(trial_seed, "attacker");
    AttackVerdict v = attack(obs, attacker);
    score(v, plan);
    result.add(v);
  }
  return result;
}

AttackTrialsResult repeated_guesses(const CandidateSets& candidates, const ScenarioPlan& plan,
                                    int draws, Rng& rng) {
  AttackTrialsResult result;
  for (int i = 0; i < draws; ++i) {
    AttackVerdict v = guess_endpoints(candidates, rng);
    score(v, plan);
    result.add(v);
  }
  return result;
}

void write_verdicts_csv(std::ostream& out, const AttackTrialsResult& result,
                        const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "trial,source_guess,dest_guess,correct_s,correct_d\n";
  for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
    const auto& v = result.verdicts[i];
    out << fmt::format("{},{},{},{},{}\n", i, v.source_guess ? v.source_guess->value : 0,
                       v.dest_guess ? v.dest_guess->value : 0, int{v.correct_source},
                       int{v.correct_dest});
  }
}

}  // namespace extrout
