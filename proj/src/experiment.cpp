#include "extrout/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "extrout/adversary.hpp"
#include "extrout/observe.hpp"
#include "extrout/reference.hpp"

namespace extrout {

namespace fs = std::filesystem;

ScenarioRequest request_from(const ExperimentConfig& cfg) {
  return {cfg.variant, cfg.scenario, cfg.target_l, cfg.source, cfg.dest};
}

namespace {

ScenarioParams search_params(const ExperimentConfig& cfg, ScenarioParams p) {
  p.abandon_incomplete = p.abandon_incomplete || cfg.full_extension;
  return p;
}

}  // namespace

namespace {

void shuffle(std::vector<std::pair<NodeId, NodeId>>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

bool acceptable(const ExperimentConfig& cfg, const ScenarioPlan& plan) {
  return !cfg.full_extension || plan.complete();
}

}  // namespace

ScenarioInstance find_scenario(const ExperimentConfig& cfg, const ScenarioRequest& req,
                               std::uint64_t rep_seed) {
  std::string last_reason = "no attempt made";
  const ScenarioParams params = search_params(cfg, req.params);
  for (int a = 0; a < cfg.reseed_limit; ++a) {
    TopologyParams tp = cfg.topology;
    tp.seed = derive_seed(rep_seed, "topology", static_cast<std::uint64_t>(a));
    auto topo = std::make_shared<const Topology>(generate_topology(tp));
    Rng rng = Rng::stream(rep_seed, "protocol", static_cast<std::uint64_t>(a));

    std::vector<std::pair<NodeId, NodeId>> pairs;
    if (req.source) {
      const NodeId s{*req.source}, d{*req.dest};
      if (!hop_distance(*topo, s, d)) {
        last_reason = fmt::format("node {} cannot reach node {}", s.value, d.value);
        continue;
      }
      pairs.emplace_back(s, d);
    } else {
      for (NodeId s : topo->nodes()) {
        const auto dist = hop_distances(*topo, s);
        for (std::size_t j = 0; j < dist.size(); ++j)
          if (dist[j] == req.target_l) pairs.emplace_back(s, NodeId::from_index(j));
      }
      if (pairs.empty()) {
        last_reason = fmt::format("no pair at {} hops", req.target_l);
        continue;
      }
      shuffle(pairs, rng);
      if (pairs.size() > static_cast<std::size_t>(cfg.pairs_per_topology))
        pairs.resize(static_cast<std::size_t>(cfg.pairs_per_topology));
    }

    for (const auto& [s, d] : pairs) {
      ScenarioPlan plan = build_scenario(topo, s, d, req.variant, params, rng);
      if (acceptable(cfg, plan)) return {topo, std::move(plan), tp.seed, a + 1};
      last_reason = fmt::format("{} pair(s) at the target distance, none admits a complete {} plan",
                                pairs.size(), req.variant.name());
    }
  }
  throw ScenarioSearchError(fmt::format("no usable scenario after {} topologies: {}",
                                        cfg.reseed_limit, last_reason));
}

std::optional<ReportedValues> matching_reference(const PathAccounting& acc) {
  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (const auto& c : reference_cases()) {
    if (c.variant.kind != acc.kind || c.L != acc.L) continue;
    if (c.variant.extrapolated() && (c.ks != acc.ks || c.kd != acc.kd)) continue;
    if (sorted(c.duplicate_hops) != sorted(acc.duplicate_hops) ||
        sorted(c.fake_hops) != sorted(acc.fake_hops) ||
        sorted(c.fake_pair_lengths) != sorted(acc.fake_pair_lengths))
      continue;
    return c.reported;
  }
  return std::nullopt;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

// Simulates one plan and scores it; shared by run and sweep.
RepResult evaluate(ScenarioInstance inst, std::uint64_t budget, std::uint64_t seed,
                   int attack_draws) {
  RepResult r;
  const ScenarioPlan& plan = inst.plan;
  r.trace = run(plan, budget, seed);
  const AttackerObservation obs = observe(r.trace, *plan.topology, plan.scheme());

  r.report = make_report(plan.variant.name(), plan.accounting());
  const double measured = measured_tof(r.trace, plan);
  if (plan.variant.residual_cover_rate > 0) {
    r.report.notes.push_back(
        fmt::format("tof_measured {} includes residual cover and is not compared", measured));
  } else {
    r.report.tof_measured = measured;
  }
  r.report.unlinkability = unlinkability_score(obs);
  r.report.reported = matching_reference(r.report.accounting);
  if (attack_draws > 0) {
    Rng attacker = Rng::stream(seed, "attacker");
    r.guesses = repeated_guesses(endpoint_candidates(obs), plan, attack_draws, attacker);
    r.report.empirical_source = r.guesses.source;
  }
  r.reconciliation = reconcile(r.report);
  for (auto& f : check_trace(r.trace, plan)) {
    r.reconciliation.passed = false;
    r.reconciliation.failures.push_back(std::move(f));
  }
  try {
    r.matrix = transmission_matrix(r.trace, plan.topology->params());
  } catch (const MatrixUnavailable&) {
  }
  r.instance = std::move(inst);
  return r;
}

}  // namespace

bool RunResult::passed() const {
  return std::all_of(reps.begin(), reps.end(),
                     [](const RepResult& r) { return r.reconciliation.passed; });
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ScenarioRequest req = request_from(cfg);
  RunResult out;
  out.reps.resize(static_cast<std::size_t>(cfg.reps));
  parallel_for(out.reps.size(), [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, "rep", r);
    out.reps[r] = evaluate(find_scenario(cfg, req, rep_seed),
                           static_cast<std::uint64_t>(cfg.scenario.packet_budget), rep_seed,
                           cfg.attack_draws);
  });
  std::vector<TrafficMatrix> ms;
  for (const auto& r : out.reps)
    if (r.matrix) ms.push_back(*r.matrix);
  if (!ms.empty() && ms.size() == out.reps.size()) out.mean = mean_matrix(ms);
  return out;
}

// ---- sweep

std::string SweepRow::status() const {
  if (instances == 0) return fmt::format("insufficient(0/{})", requested);
  if (instances < requested) return fmt::format("insufficient({}/{})", instances, requested);
  if (!reconciled) return "unreconciled";
  return "ok";
}

namespace {

struct SweepPoint {
  SweepRow row;
  ScenarioRequest req;
  std::uint64_t seed = 0;
};

// Mean that returns the common value when every sample agrees, so formula
// columns stay bit-exact.
double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void run_points(const ExperimentConfig& cfg, std::vector<SweepPoint>& points) {
  const std::size_t per = static_cast<std::size_t>(cfg.sweep.pairs_per_length);
  std::vector<std::optional<RepResult>> results(points.size() * per);
  parallel_for(results.size(), [&](std::size_t k) {
    const SweepPoint& p = points[k / per];
    const std::uint64_t seed = derive_seed(p.seed, "rep", k % per);
    try {
      results[k] = evaluate(find_scenario(cfg, p.req, seed),
                            static_cast<std::uint64_t>(cfg.scenario.packet_budget), seed, 0);
    } catch (const ScenarioSearchError&) {
      // Missing instance; the row is flagged.
    }
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepRow& row = points[i].row;
    row.requested = static_cast<int>(per);
    if (points[i].req.variant.extrapolated()) {
      row.ks = points[i].req.params.ks.value_or(0);
      row.kd = points[i].req.params.kd.value_or(0);
    }
    std::vector<double> single, pair, ta, tm;
    for (std::size_t j = 0; j < per; ++j) {
      const auto& r = results[i * per + j];
      if (!r) continue;
      ++row.instances;
      single.push_back(r->report.anonymity_single);
      pair.push_back(r->report.anonymity_pair);
      ta.push_back(r->report.tof_analytical);
      tm.push_back(r->report.tof_measured.value_or(measured_tof(r->trace, r->instance.plan)));
      row.reconciled = row.reconciled && r->reconciliation.passed;
      if (row.instances == 1) {
        row.ks = r->report.accounting.ks;
        row.kd = r->report.accounting.kd;
      }
    }
    row.anonymity_single = mean_of(single);
    row.anonymity_pair = mean_of(pair);
    row.tof_analytical = mean_of(ta);
    row.tof_measured = mean_of(tm);
  }
}

}  // namespace

SweepResult sweep_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& sw = cfg.sweep;
  if (sw.l_targets.empty() || sw.k_settings.empty())
    throw ConfigError("sweep.l_targets and sweep.k_settings must be nonempty");
  if (sw.pairs_per_length < 1) throw ConfigError("sweep.pairs_per_length must be >= 1");
  for (int l : sw.l_targets)
    if (l < 1) throw ConfigError("sweep.l_targets entries must be >= 1");
  for (const auto& k : sw.k_settings)
    if (k.ks < 0 || k.kd < 0) throw ConfigError("sweep.k_settings entries must be >= 0");
  for (const auto* axis : {&sw.duplicates, &sw.fakes, &sw.nfakes})
    for (int n : *axis)
      if (n < 1) throw ConfigError("sweep technique counts must be >= 1");

  auto params_for = [&](int ks, int kd) {
    ScenarioParams p = cfg.scenario;
    p.ks = ks;
    p.kd = kd;
    return p;
  };

  std::vector<SweepPoint> by_length;
  for (std::size_t k = 0; k < sw.k_settings.size(); ++k) {
    const auto ks = sw.k_settings[k];
    for (int l : sw.l_targets) {
      SweepPoint p;
      p.row.technique = variant_key(VariantKind::kExtroutBaseline);
      p.row.L = l;
      p.req = {ProtocolVariant::baseline(), params_for(ks.ks, ks.kd), l, {}, {}};
      p.req.variant.residual_cover_rate = cfg.variant.residual_cover_rate;
      p.seed = derive_seed(cfg.seed, "sweep_length", k * 1000 + static_cast<std::size_t>(l));
      by_length.push_back(std::move(p));
    }
  }

  std::vector<ProtocolVariant> techniques{ProtocolVariant::no_privacy(),
                                          ProtocolVariant::baseline()};
  for (int n : sw.duplicates) techniques.push_back(ProtocolVariant::duplicates(n));
  for (int f : sw.fakes) techniques.push_back(ProtocolVariant::fake(f));
  for (int n : sw.nfakes) techniques.push_back(ProtocolVariant::nfake(n));
  const auto k0 = sw.k_settings.front();
  std::vector<SweepPoint> frontier;
  for (std::size_t t = 0; t < techniques.size(); ++t) {
    SweepPoint p;
    p.row.technique = variant_key(techniques[t].kind);
    p.row.count = techniques[t].count;
    p.row.L = sw.fixed_l;
    p.req = {techniques[t], params_for(k0.ks, k0.kd), sw.fixed_l, {}, {}};
    p.req.variant.residual_cover_rate = cfg.variant.residual_cover_rate;
    p.seed = derive_seed(cfg.seed, "sweep_frontier", t);
    frontier.push_back(std::move(p));
  }

  run_points(cfg, by_length);
  run_points(cfg, frontier);
  SweepResult out;
  for (auto& p : by_length) out.by_length.push_back(p.row);
  for (auto& p : frontier) out.frontier.push_back(p.row);
  return out;
}

std::vector<Dominance> extrout_dominates_nfake(const std::vector<SweepRow>& frontier) {
  const std::string nfake = variant_key(VariantKind::kNFakePairs);
  auto label = [](const SweepRow& r) {
    return r.count ? fmt::format("{}({})", r.technique, r.count) : r.technique;
  };
  std::vector<Dominance> out;
  for (VariantKind kind : {VariantKind::kExtroutBaseline, VariantKind::kExtroutDuplicates,
                           VariantKind::kExtroutFake}) {
    const std::string key = variant_key(kind);
    bool present = false;
    Dominance d{key, false, {}};
    for (const auto& e : frontier) {
      if (e.technique != key || e.instances == 0) continue;
      present = true;
      for (const auto& f : frontier) {
        if (f.technique != nfake || f.instances == 0) continue;
        if (e.anonymity_single > f.anonymity_single && e.tof_measured <= f.tof_measured) {
          d.dominates = true;
          d.witness = fmt::format("{} ({}, tof {}) over {} ({}, tof {})", label(e),
                                  e.anonymity_single, e.tof_measured, label(f),
                                  f.anonymity_single, f.tof_measured);
          break;
        }
      }
      if (d.dominates) break;
    }
    if (present) out.push_back(std::move(d));
  }
  return out;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_length_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "L,ks,kd,instances,anonymity_single,anonymity_pair,tof_analytical,tof_measured,status\n";
  for (const auto& r : rows) {
    if (r.instances == 0) {
      out << fmt::format("{},{},{},0,,,,,{}\n", r.L, r.ks, r.kd, r.status());
      continue;
    }
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.L, r.ks, r.kd, r.instances,
                       r.anonymity_single, r.anonymity_pair, r.tof_analytical, r.tof_measured,
                       r.status());
  }
}

void write_frontier_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                        const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "technique,count,L,ks,kd,instances,anonymity_single,anonymity_pair,tof_analytical,"
         "tof_measured,status\n";
  for (const auto& r : rows) {
    if (r.instances == 0) {
      out << fmt::format("{},{},{},,,0,,,,,{}\n", r.technique, r.count, r.L, r.status());
      continue;
    }
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.technique, r.count, r.L, r.ks,
                       r.kd, r.instances, r.anonymity_single, r.anonymity_pair,
                       r.tof_analytical, r.tof_measured, r.status());
  }
}

// ---- attack

namespace {

bool is_extrout(const PathAccounting& acc) {
  return acc.kind == VariantKind::kExtroutBaseline ||
         acc.kind == VariantKind::kExtroutDuplicates || acc.kind == VariantKind::kExtroutFake;
}

double predicted_dest_success(const PathAccounting& acc) {
  const double per_chain = 1.0 / acc.chain_count();
  if (!is_extrout(acc)) return per_chain;
  double p = per_chain / acc.main_hops();
  if (acc.kd == 0)
    for (int h : acc.duplicate_hops) p += per_chain / h;
  return p;
}

double predicted_pair_success(const PathAccounting& acc) {
  const double per_chain = 1.0 / acc.chain_count();
  return is_extrout(acc) ? per_chain / acc.main_hops() : per_chain;
}

}  // namespace

bool AttackSummary::passed() const {
  return within_binomial_sigma(result.source, predicted_source) &&
         within_binomial_sigma(result.dest, predicted_dest) &&
         within_binomial_sigma(result.pair, predicted_pair);
}

AttackSummary attack_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.trials < 100) throw ConfigError("attack.trials must be >= 100");
  const ScenarioRequest req = request_from(cfg);
  AttackSummary s;
  s.instance = find_scenario(cfg, req, derive_seed(cfg.seed, "rep", 0));
  const auto topo = s.instance.topology;
  const NodeId src = s.instance.plan.source, dst = s.instance.plan.dest;
  const ScenarioParams params = search_params(cfg, req.params);

  // Per-trial predictions are averaged; the success count is then a sum of
  // independent Bernoulli draws with that mean.
  double sum_s = 0, sum_d = 0, sum_p = 0;
  auto generate = [&](std::uint64_t trial_seed) {
    for (int k = 0; k < cfg.reseed_limit; ++k) {
      Rng rng = Rng::stream(trial_seed, "protocol", static_cast<std::uint64_t>(k));
      ScenarioPlan plan = build_scenario(topo, src, dst, req.variant, params, rng);
      if (!acceptable(cfg, plan)) continue;
      const PathAccounting acc = plan.accounting();
      sum_s += predicted_source_success(acc);
      sum_d += predicted_dest_success(acc);
      sum_p += predicted_pair_success(acc);
      return plan;
    }
    throw ScenarioSearchError(fmt::format("no complete plan for {} -> {} after {} draws",
                                          src.value, dst.value, cfg.reseed_limit));
  };
  s.result = attack_trials(generate, cfg.trials, cfg.seed,
                           static_cast<std::uint64_t>(cfg.trial_budget));
  s.predicted_source = sum_s / cfg.trials;
  s.predicted_dest = sum_d / cfg.trials;
  s.predicted_pair = sum_p / cfg.trials;
  return s;
}

std::string to_text(const AttackSummary& s) {
  const auto& plan = s.instance.plan;
  std::string out;
  out += fmt::format("variant = {}\n", plan.variant.name());
  out += fmt::format("source = {}\ndest = {}\nL = {}\n", plan.source.value, plan.dest.value,
                     plan.L());
  out += fmt::format("topology_seed = {}\n", s.instance.topology_seed);
  auto line = [&](const char* name, const EmpiricalRate& r, double p) {
    const double sigma = r.trials ? std::sqrt(p * (1 - p) / r.trials) : 0.0;
    out += fmt::format(
        "{}_success = {} ({}/{}), wilson95 = [{}, {}], predicted = {}, 3sigma = [{}, {}], {}\n",
        name, r.rate(), r.successes, r.trials, r.wilson_lo(), r.wilson_hi(), p, p - 3 * sigma,
        p + 3 * sigma, within_binomial_sigma(r, p) ? "within" : "OUTSIDE");
  };
  line("source", s.result.source, s.predicted_source);
  line("dest", s.result.dest, s.predicted_dest);
  line("pair", s.result.pair, s.predicted_pair);
  out += fmt::format("status = {}\n", s.passed() ? "reconciled" : "FAILED");
  return out;
}

// ---- subcommands

namespace {

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  const fs::path p = fs::path(cfg.out) / name;
  std::ofstream f(p);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  return f;
}

std::vector<std::string> prov(const ExperimentConfig& cfg, std::string_view command) {
  return provenance(cfg, command);
}

}  // namespace

int cmd_topology(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  TopologyParams tp = cfg.topology;
  tp.seed = cfg.seed;
  const Topology topo = generate_topology(tp);
  const auto comments = prov(cfg, "topology");
  {
    auto f = open_out(cfg, "topology.txt");
    write_topology(f, topo, comments);
  }
  const std::string summary =
      fmt::format("nodes = {}\nlinks = {}\naverage_degree = {}\n", topo.size(),
                  topo.links().size(), average_degree(topo));
  {
    auto f = open_out(cfg, "degree_report.txt");
    write_comments(f, comments);
    f << summary;
  }
  log << summary;
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  RunResult res;
  try {
    res = run_experiment(cfg);
  } catch (const ScenarioSearchError& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  const auto comments = prov(cfg, "run");
  const RepResult& r0 = res.reps.front();

  {
    auto f = open_out(cfg, "run_reps.csv");
    write_comments(f, comments);
    f << "rep,topology_seed,attempts,source,dest,reconciled," << report_csv_header() << '\n';
    for (std::size_t i = 0; i < res.reps.size(); ++i) {
      const auto& r = res.reps[i];
      f << fmt::format("{},{},{},{},{},{},", i, r.instance.topology_seed, r.instance.attempts,
                       r.instance.plan.source.value, r.instance.plan.dest.value,
                       r.reconciliation.passed ? 1 : 0)
        << to_csv_row(r.report) << '\n';
    }
  }
  if (res.mean) {
    auto f = open_out(cfg, "matrix_mean.csv");
    write_matrix_csv(f, *res.mean, comments);
    auto h = open_out(cfg, "heatmap.txt");
    write_comments(h, comments);
    h << ascii_heatmap(*res.mean);
  }
  {
    auto f = open_out(cfg, "plan_rep0.txt");
    write_comments(f, comments);
    f << to_text(r0.instance.plan);
  }
  {
    auto f = open_out(cfg, "trace_rep0.csv");
    write_trace_csv(f, r0.trace, comments);
    auto l = open_out(cfg, "trace_links_rep0.csv");
    write_link_csv(l, r0.trace, comments);
    auto t = open_out(cfg, "topology_rep0.txt");
    write_topology(t, *r0.instance.topology, comments);
  }

  std::vector<double> single, pair, ta, tm, unl;
  EmpiricalRate src, dst, pr;
  double predicted = 0;
  int passed = 0;
  for (const auto& r : res.reps) {
    single.push_back(r.report.anonymity_single);
    pair.push_back(r.report.anonymity_pair);
    ta.push_back(r.report.tof_analytical);
    tm.push_back(measured_tof(r.trace, r.instance.plan));
    unl.push_back(r.report.unlinkability.value_or(0));
    src.successes += r.guesses.source.successes;
    src.trials += r.guesses.source.trials;
    dst.successes += r.guesses.dest.successes;
    dst.trials += r.guesses.dest.trials;
    pr.successes += r.guesses.pair.successes;
    pr.trials += r.guesses.pair.trials;
    predicted += r.report.predicted_source_success;
    passed += r.reconciliation.passed ? 1 : 0;
  }
  predicted /= static_cast<double>(res.reps.size());

  std::string text;
  text += fmt::format("reps = {}\n", res.reps.size());
  text += fmt::format("variant = {}\n", r0.report.variant);
  text += fmt::format("mean_anonymity_single = {}\n", mean_of(single));
  text += fmt::format("mean_anonymity_pair = {}\n", mean_of(pair));
  text += fmt::format("mean_tof_analytical = {}\n", mean_of(ta));
  text += fmt::format("mean_tof_measured = {}\n", mean_of(tm));
  text += fmt::format("mean_unlinkability = {}\n", mean_of(unl));
  if (src.trials) {
    text += fmt::format("attack_source_success = {} ({}/{}), predicted {}\n", src.rate(),
                        src.successes, src.trials, predicted);
    text += fmt::format("attack_dest_success = {} ({}/{})\n", dst.rate(), dst.successes,
                        dst.trials);
    text += fmt::format("attack_pair_success = {} ({}/{})\n", pr.rate(), pr.successes, pr.trials);
  }
  text += fmt::format("reconciled_reps = {}/{}\n", passed, res.reps.size());
  text += "\n[rep 0]\n" + to_text(r0.report) + to_text(r0.reconciliation);
  for (std::size_t i = 0; i < res.reps.size(); ++i)
    if (!res.reps[i].reconciliation.passed)
      text += fmt::format("\n[rep {} failed]\n", i) + to_text(res.reps[i].reconciliation);
  {
    auto f = open_out(cfg, "run_report.txt");
    write_comments(f, comments);
    f << text;
  }
  log << text.substr(0, text.find("\n[rep 0]"));
  return res.passed() ? 0 : 2;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const SweepResult res = sweep_experiment(cfg);
  const auto comments = prov(cfg, "sweep");
  {
    auto f = open_out(cfg, "anonymity_vs_L.csv");
    write_length_csv(f, res.by_length, comments);
  }
  {
    auto f = open_out(cfg, "anonymity_vs_tof.csv");
    write_frontier_csv(f, res.frontier, comments);
  }
  std::string text;
  bool reconciled = true;
  for (const auto* rows : {&res.by_length, &res.frontier})
    for (const auto& r : *rows) {
      reconciled = reconciled && r.reconciled;
      if (r.status() != "ok")
        text += fmt::format("row {}({}) L={} ks={} kd={}: {}\n", r.technique, r.count, r.L, r.ks,
                            r.kd, r.status());
    }
  for (const auto& d : extrout_dominates_nfake(res.frontier))
    text += fmt::format("{} dominates nfake: {}{}\n", d.technique, d.dominates ? "yes" : "no",
                        d.witness.empty() ? "" : " - " + d.witness);
  {
    auto f = open_out(cfg, "sweep_summary.txt");
    write_comments(f, comments);
    f << text;
  }
  log << text;
  return reconciled ? 0 : 2;
}

int cmd_attack(const ExperimentConfig& cfg, std::ostream& log) {
  AttackSummary s;
  try {
    s = attack_experiment(cfg);
  } catch (const ScenarioSearchError& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  const auto comments = prov(cfg, "attack");
  {
    auto f = open_out(cfg, "attack_verdicts.csv");
    write_verdicts_csv(f, s.result, comments);
  }
  const std::string text = to_text(s);
  {
    auto f = open_out(cfg, "attack_summary.txt");
    write_comments(f, comments);
    f << text;
  }
  log << text;
  return s.passed() ? 0 : 2;
}

namespace {

// `consistent` is cleared when link counts were given and the node counts above
// the background do not add up to them (every hop is one sender transmission).
std::string analyse_trace(const ExperimentConfig& cfg, const ReportInputs& in, bool& consistent) {
  std::ifstream tf(in.trace);
  if (!tf) throw ConfigError(fmt::format("cannot open trace '{}'", in.trace));
  TrafficTrace trace = read_trace_csv(tf);
  if (!in.links.empty()) {
    std::ifstream lf(in.links);
    if (!lf) throw ConfigError(fmt::format("cannot open link counts '{}'", in.links));
    read_link_csv(lf, trace);
  }
  AttackerObservation obs;
  obs.scheme = cfg.variant.extrapolated() ? SchemeFamily::kExtrapolated
                                          : SchemeFamily::kEndpointsExposed;
  if (!in.topology.empty()) {
    std::ifstream pf(in.topology);
    if (!pf) throw ConfigError(fmt::format("cannot open topology '{}'", in.topology));
    obs = observe(trace, read_topology(pf), obs.scheme);
  } else {
    obs.intervals = trace.intervals;
    obs.node_tx = trace.node_tx;
    obs.link_tx = trace.link_tx;
    for (const auto& [l, c] : trace.link_tx) obs.links.push_back(l);
  }
  const ActiveSubgraph active = active_subgraph(obs);
  const CandidateSets cands = endpoint_candidates(obs);
  std::string out;
  out += fmt::format("trace = {}\nscheme = {}\nintervals = {}\n", in.trace, to_string(obs.scheme),
                     obs.intervals);
  out += fmt::format("background_floor = {}\nactive_nodes = {}\nactive_links = {}\n",
                     background_floor(obs), active.nodes.size(), active.links.size());
  out += fmt::format("chains = {}\n", cands.chains.size());
  for (std::size_t i = 0; i < cands.chains.size(); ++i) {
    const auto& c = cands.chains[i];
    out += fmt::format("chain.{} = {} nodes, rate {}, first {}, last {}\n", i + 1,
                       c.nodes.size(), c.rate, c.nodes.front().value, c.nodes.back().value);
  }
  out += fmt::format("source_candidates = {}\ndest_candidates = {}\n", cands.sources.size(),
                     cands.dests.size());
  out += fmt::format("unlinkability = {}\n", unlinkability_score(obs));
  if (!in.links.empty()) {
    const std::uint64_t floor = background_floor(obs);
    std::uint64_t above = 0, hops = 0;
    for (auto c : obs.node_tx) above += c - floor;
    for (const auto& [l, c] : obs.link_tx) hops += c;
    consistent = above == hops;
    out += fmt::format("conservation = {} ({} transmissions above background, {} on links)\n",
                       consistent ? "ok" : "violated", above, hops);
  }
  return out;
}

}  // namespace

int cmd_report(const ExperimentConfig& cfg, const ReportInputs& inputs, std::ostream& log) {
  cfg.validate();
  const auto comments = prov(cfg, "report");
  std::vector<ReferenceOutcome> outcomes;
  for (const auto& c : reference_cases())
    outcomes.push_back(evaluate_reference(c, static_cast<std::uint64_t>(cfg.scenario.packet_budget),
                                          cfg.seed));
  bool passed = true;
  std::string text;
  {
    auto f = open_out(cfg, "reference_reconciliation.csv");
    write_comments(f, comments);
    f << "label,variant,anonymity_computed,tof_analytical,tof_measured,anonymity_reported,"
         "tof_reported,reconciled,discrepancy,interpretation\n";
    for (const auto& o : outcomes) {
      const auto& r = o.report;
      const auto& rec = o.reconciliation;
      passed = passed && rec.passed;
      f << fmt::format("{},{},{},{},{},{},{},{},{},\"{}\"\n", o.input.label, r.variant,
                       r.anonymity_single, r.tof_analytical, r.tof_measured.value_or(0),
                       o.input.reported.anonymity, o.input.reported.tof, rec.passed ? 1 : 0,
                       rec.discrepancy ? 1 : 0, o.input.reported.interpretation);
      text += fmt::format("[{}]\n", o.input.label) + to_text(r) + to_text(rec) + "\n";
    }
  }
  if (!inputs.trace.empty()) {
    bool consistent = true;
    text += "[trace analysis]\n" + analyse_trace(cfg, inputs, consistent);
    passed = passed && consistent;
  }
  {
    auto f = open_out(cfg, "reference_reconciliation.txt");
    write_comments(f, comments);
    f << text;
  }
  log << text;
  return passed ? 0 : 2;
}

}  // namespace extrout
