#include "extrout/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace extrout {

void ScenarioParams::validate() const {
  if (k_min < 0 || k_max < k_min) throw std::invalid_argument("need 0 <= k_min <= k_max");
  if ((ks && *ks < 0) || (kd && *kd < 0))
    throw std::invalid_argument("extension lengths must be non-negative");
  if (source_rate < 1) throw std::invalid_argument("source rate must be >= 1");
  if (packet_budget < 1) throw std::invalid_argument("packet budget must be >= 1");
}

std::vector<ActivePath> ScenarioPlan::active_paths() const {
  std::vector<ActivePath> out;
  if (main) {
    out.push_back({&main->route, PathRole::kMain, std::pair{main->s_index, main->d_index}});
  } else {
    out.push_back({&real_path, PathRole::kMain,
                   std::pair<std::size_t, std::size_t>{0, real_path.nodes.size() - 1}});
  }
  for (const auto& r : duplicates) out.push_back({&r, PathRole::kDuplicate, std::nullopt});
  for (const auto& f : fake_paths) out.push_back({&f.route, PathRole::kFakeExtended, std::nullopt});
  for (const auto& f : fake_pairs) out.push_back({&f.route, PathRole::kFakePair, std::nullopt});
  return out;
}

PathAccounting ScenarioPlan::accounting() const {
  PathAccounting acc;
  acc.kind = variant.kind;
  acc.L = L();
  if (main) {
    acc.ks = main->ks;
    acc.kd = main->kd;
  }
  for (const auto& r : duplicates) acc.duplicate_hops.push_back(r.hops());
  for (const auto& f : fake_paths) acc.fake_hops.push_back(f.route.hops());
  for (const auto& f : fake_pairs) acc.fake_pair_lengths.push_back(f.route.hops());
  return acc;
}

bool ScenarioPlan::complete() const {
  if (main && !main->fully_extended()) return false;
  for (const auto& f : fake_paths)
    if (!f.fully_extended()) return false;
  switch (variant.kind) {
    case VariantKind::kExtroutDuplicates:
      return static_cast<int>(duplicates.size()) == variant.count;
    case VariantKind::kExtroutFake:
      return static_cast<int>(fake_paths.size()) == variant.count;
    case VariantKind::kNFakePairs:
      return static_cast<int>(fake_pairs.size()) == variant.count;
    default:
      return true;
  }
}

namespace {

Position path_middle(const Topology& topo, const Route& r) {
  const std::size_t h = static_cast<std::size_t>(r.hops());
  const Position a = topo.position(r.nodes[h / 2]);
  if (h % 2 == 0) return a;
  const Position b = topo.position(r.nodes[h / 2 + 1]);
  return {(a.x + b.x) / 2, (a.y + b.y) / 2};
}

}  // namespace

FakePair place_fake_pair(const Topology& topo, const Route& real_route, int target_hops,
                         Rng& rng, std::span<const NodeId> avoid, const HopTable* table,
                         const std::function<bool(const FakePair&)>& admissible) {
  std::optional<HopTable> local;
  if (!table) table = &local.emplace(topo);

  std::vector<char> blocked(topo.size(), 0);
  for (NodeId v : real_route.nodes) blocked[v.index()] = 1;
  for (NodeId v : avoid)
    if (topo.contains(v)) blocked[v.index()] = 1;

  struct Candidate {
    double score;
    FakePair pair;
  };
  constexpr double kTie = 1e-9;
  for (int tolerance : {1, 2}) {
    std::vector<Candidate> cands;
    for (NodeId sf : topo.nodes()) {
      if (blocked[sf.index()]) continue;
      const auto row = table->from(sf);
      for (NodeId df : topo.nodes()) {
        const int lf = row[df.index()];
        if (df == sf || blocked[df.index()] || lf < 1) continue;
        if (std::abs(lf - target_hops) > tolerance) continue;
        Route path = table->path(topo, sf, df);
        if (std::any_of(path.nodes.begin(), path.nodes.end(),
                        [&](NodeId v) { return blocked[v.index()] != 0; }))
          continue;
        const Position mid = path_middle(topo, path);
        double score = std::numeric_limits<double>::infinity();
        for (NodeId v : real_route.nodes) score = std::min(score, distance(mid, topo.position(v)));
        cands.push_back({score, {sf, df, std::move(path)}});
      }
    }
    // Best score first; equal scores (within kTie) in random order.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    for (std::size_t lo = 0; lo < cands.size();) {
      std::size_t hi = lo + 1;
      while (hi < cands.size() && cands[lo].score - cands[hi].score <= kTie) ++hi;
      for (std::size_t i = hi - lo; i > 1; --i)
        std::swap(cands[lo + i - 1], cands[lo + rng.below(i)]);
      for (std::size_t i = lo; i < hi; ++i)
        if (!admissible || admissible(cands[i].pair)) return std::move(cands[i].pair);
      lo = hi;
    }
  }
  throw NoPlacementError(
      fmt::format("no fake pair within two hops of length {} avoids the real route", target_hops));
}

double pad_link(double rate_high, double rate_low) {
  if (!(rate_low >= 0.0) || !(rate_high >= rate_low))
    throw std::invalid_argument("pad_link needs rate_high >= rate_low >= 0");
  return rate_low;
}

ScenarioPlan build_scenario(std::shared_ptr<const Topology> topo, NodeId s, NodeId d,
                            const ProtocolVariant& variant, const ScenarioParams& params,
                            Rng& rng) {
  variant.validate();
  params.validate();
  if (!topo) throw std::invalid_argument("build_scenario: no topology");
  if (!topo->contains(s) || !topo->contains(d)) throw std::invalid_argument("unknown S or D");
  if (s == d) throw std::invalid_argument("S and D must differ");

  ScenarioPlan plan;
  plan.topology = topo;
  plan.variant = variant;
  plan.source = s;
  plan.dest = d;
  plan.source_rate = params.source_rate;
  plan.packet_budget = params.packet_budget;
  plan.link_padding = params.link_padding;
  plan.real_path = shortest_path(*topo, s, d);
  const int L = plan.real_path.hops();

  auto draw_k = [&](std::optional<int> fixed) {
    return fixed ? *fixed : rng.uniform_int(params.k_min, params.k_max);
  };
  const ExtensionOptions strictness{params.strict, {}};

  if (variant.extrapolated()) {
    const int ks = draw_k(params.ks);
    const int kd = draw_k(params.kd);
    plan.main = extrapolate(*topo, plan.real_path, ks, kd, rng, strictness);
    if (plan.main->source_blocked()) plan.notes.push_back("no source-side extension possible");
    if (plan.main->dest_blocked()) plan.notes.push_back("no destination-side extension possible");
    if (params.abandon_incomplete && !plan.main->fully_extended()) return plan;
  }

  switch (variant.kind) {
    case VariantKind::kNoPrivacy:
    case VariantKind::kExtroutBaseline:
      break;

    case VariantKind::kExtroutDuplicates: {
      auto set = disjoint_paths(*topo, plan.main->anchor_source(), plan.main->anchor_dest(),
                                variant.count, plan.main->route);
      plan.duplicates = std::move(set.paths);
      plan.duplicate_status = set.status;
      if (set.shortfall())
        plan.notes.push_back(fmt::format("disjoint paths: {} of {} found ({})",
                                         plan.duplicates.size(), variant.count,
                                         to_string(set.status)));
      break;
    }

    case VariantKind::kExtroutFake: {
      const HopTable table(*topo);
      std::vector<NodeId> used = plan.main->route.nodes;
      for (int i = 0; i < variant.count; ++i) {
        ExtensionOptions opts{params.strict, used, &table};
        const int fks = rng.uniform_int(params.k_min, params.k_max);
        const int fkd = rng.uniform_int(params.k_min, params.k_max);
        // Placements that cannot carry the full extension are passed over.
        std::optional<ExtendedRoute> extended;
        auto extendable = [&](const FakePair& p) {
          extended = extrapolate(*topo, p.route, fks, fkd, rng, opts);
          return extended->fully_extended();
        };
        try {
          place_fake_pair(*topo, plan.main->route, L, rng, used, &table, extendable);
        } catch (const NoPlacementError& e) {
          plan.notes.push_back(fmt::format("fake path {}: {}", i + 1, e.what()));
          break;
        }
        auto ext = std::move(*extended);
        used.insert(used.end(), ext.route.nodes.begin(), ext.route.nodes.end());
        plan.fake_paths.push_back(std::move(ext));
      }
      break;
    }

    case VariantKind::kNFakePairs: {
      const HopTable table(*topo);
      std::vector<NodeId> used;
      for (int i = 0; i < variant.count; ++i) {
        FakePair pair;
        try {
          pair = place_fake_pair(*topo, plan.real_path, L, rng, used, &table);
        } catch (const NoPlacementError& e) {
          plan.notes.push_back(fmt::format("fake pair {}: {}", i + 1, e.what()));
          break;
        }
        used.insert(used.end(), pair.route.nodes.begin(), pair.route.nodes.end());
        plan.fake_pairs.push_back(std::move(pair));
      }
      break;
    }
  }
  return plan;
}

TransmissionSchedule dummy_schedule(const ScenarioPlan& plan) {
  TransmissionSchedule sched;
  sched.residual_rate = plan.variant.residual_cover_rate;
  sched.node_count = plan.topology ? plan.topology->size() : 0;
  for (const ActivePath& path : plan.active_paths()) {
    const auto& nodes = path.route->nodes;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const bool real = path.real_hops && i >= path.real_hops->first && i < path.real_hops->second;
      for (int slot = 0; slot < plan.source_rate; ++slot)
        sched.per_interval.push_back(
            {nodes[i], nodes[i + 1], real ? EventKind::kReal : EventKind::kDummy});
    }
  }
  if (plan.link_padding && plan.topology) apply_link_padding(sched, *plan.topology);
  return sched;
}

void apply_link_padding(TransmissionSchedule& schedule, const Topology& topo) {
  // receiver -> (sender -> events per interval)
  std::map<NodeId, std::map<NodeId, int>> inbound;
  for (const auto& e : schedule.per_interval)
    if (e.next_hop) ++inbound[*e.next_hop][e.sender];

  std::vector<TransmissionEvent> cover;
  for (const auto& [merge, senders] : inbound) {
    if (senders.size() < 2) continue;
    auto high = std::max_element(senders.begin(), senders.end(),
                                 [](const auto& x, const auto& y) { return x.second < y.second; });
    for (const auto& [other, rate] : senders) {
      if (other == high->first || !topo.linked(high->first, other)) continue;
      const auto eps = static_cast<int>(std::lround(pad_link(high->second, rate)));
      for (int k = 0; k < eps; ++k) cover.push_back({high->first, other, EventKind::kDummy});
    }
  }
  schedule.per_interval.insert(schedule.per_interval.end(), cover.begin(), cover.end());
}

void validate_plan(const ScenarioPlan& plan) {
  if (!plan.topology) throw std::invalid_argument("plan has no topology");
  const Topology& topo = *plan.topology;
  auto check = [&](const Route& r, const std::string& what) {
    if (!is_valid_route(topo, r)) throw std::invalid_argument(what + " is not a valid route");
  };
  check(plan.real_path, "real path");
  if (plan.real_path.front() != plan.source || plan.real_path.back() != plan.dest)
    throw std::invalid_argument("real path does not join S and D");
  if (plan.main) {
    check(plan.main->route, "main route");
    if (plan.main->core() != plan.real_path)
      throw std::invalid_argument("main route does not embed the real path");
  }
  std::set<NodeId> interior;
  if (plan.main)
    for (std::size_t i = 1; i + 1 < plan.main->route.nodes.size(); ++i)
      interior.insert(plan.main->route.nodes[i]);
  for (const auto& r : plan.duplicates) {
    check(r, "duplicate");
    if (!plan.main || r.front() != plan.main->anchor_source() ||
        r.back() != plan.main->anchor_dest())
      throw std::invalid_argument("duplicate does not join the anchors");
    for (std::size_t i = 1; i + 1 < r.nodes.size(); ++i)
      if (!interior.insert(r.nodes[i]).second)
        throw std::invalid_argument("duplicates are not internally disjoint");
  }
  auto no_real_endpoints = [&](const Route& r, const std::string& what) {
    if (r.contains(plan.source) || r.contains(plan.dest))
      throw std::invalid_argument(what + " contains the real S or D");
  };
  for (const auto& f : plan.fake_paths) {
    check(f.route, "fake path");
    no_real_endpoints(f.route, "fake path");
  }
  for (const auto& f : plan.fake_pairs) {
    check(f.route, "fake pair path");
    no_real_endpoints(f.route, "fake pair path");
  }
}

std::string to_text(const ScenarioPlan& plan) {
  std::string out;
  out += fmt::format("variant = {}\n", plan.variant.name());
  out += fmt::format("residual_cover_rate = {}\n", plan.variant.residual_cover_rate);
  out += fmt::format("source = {}\ndest = {}\n", plan.source.value, plan.dest.value);
  out += fmt::format("L = {}\n", plan.L());
  out += fmt::format("real_path = {}\n", format_route(plan.real_path));
  if (plan.main) {
    const auto& m = *plan.main;
    out += fmt::format("main_route = {}\n", format_route(m.route));
    out += fmt::format("main_hops = {}\n", m.route.hops());
    out += fmt::format("s_index = {}\nd_index = {}\n", m.s_index, m.d_index);
    out += fmt::format("ks = {}\nkd = {}\nrequested_ks = {}\nrequested_kd = {}\n", m.ks, m.kd,
                       m.requested_ks, m.requested_kd);
  }
  if (plan.duplicate_status)
    out += fmt::format("duplicate_status = {}\n", to_string(*plan.duplicate_status));
  for (std::size_t i = 0; i < plan.duplicates.size(); ++i)
    out += fmt::format("duplicate.{} = {}\n", i + 1, format_route(plan.duplicates[i]));
  for (std::size_t i = 0; i < plan.fake_paths.size(); ++i) {
    const auto& f = plan.fake_paths[i];
    out += fmt::format("fake_path.{} = {}\n", i + 1, format_route(f.route));
    out += fmt::format("fake_path.{}.source = {}\nfake_path.{}.dest = {}\n", i + 1,
                       f.source().value, i + 1, f.dest().value);
  }
  for (std::size_t i = 0; i < plan.fake_pairs.size(); ++i) {
    const auto& f = plan.fake_pairs[i];
    out += fmt::format("fake_pair.{} = {}\n", i + 1, format_route(f.route));
    out += fmt::format("fake_pair.{}.source = {}\nfake_pair.{}.dest = {}\n", i + 1,
                       f.source.value, i + 1, f.dest.value);
  }
  out += fmt::format("source_rate = {}\npacket_budget = {}\n", plan.source_rate,
                     plan.packet_budget);
  for (const auto& n : plan.notes) out += fmt::format("note = {}\n", n);
  return out;
}

}  // namespace extrout
