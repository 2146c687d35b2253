#include "extrout/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace extrout {

std::uint64_t background_floor(const AttackerObservation& obs) {
  if (obs.node_tx.empty()) return 0;
  return *std::min_element(obs.node_tx.begin(), obs.node_tx.end());
}

std::uint64_t default_threshold(const AttackerObservation& obs) {
  std::uint64_t busiest = 0;
  for (const auto& [link, count] : obs.link_tx) busiest = std::max(busiest, count);
  return std::max<std::uint64_t>(1, (busiest + 1) / 2);
}

ActiveSubgraph active_subgraph(const AttackerObservation& obs,
                               std::optional<std::uint64_t> threshold) {
  const std::uint64_t thr = std::max<std::uint64_t>(1, threshold.value_or(default_threshold(obs)));
  const std::uint64_t floor = background_floor(obs);
  std::set<NodeId> nodes;
  ActiveSubgraph out;
  for (const auto& [link, count] : obs.link_tx) {
    if (count < thr) continue;
    out.links.push_back(link);
    nodes.insert(link.a);
    nodes.insert(link.b);
  }
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (obs.node_tx[i] - floor >= thr) nodes.insert(NodeId::from_index(i));
  out.nodes.assign(nodes.begin(), nodes.end());
  return out;
}

namespace {

struct ActiveView {
  std::vector<std::vector<NodeId>> adj;  // active links only
  std::vector<std::uint64_t> link_sum;   // sum of incident active link counts
  std::vector<std::uint64_t> tx;         // background removed

  // 2 * outflow - (inflow + outflow): positive at flow origins, negative at sinks.
  std::int64_t imbalance(NodeId v) const {
    return 2 * static_cast<std::int64_t>(tx[v.index()]) -
           static_cast<std::int64_t>(link_sum[v.index()]);
  }
  bool terminal(NodeId v) const { return adj[v.index()].size() != 2 || imbalance(v) != 0; }
};

ActiveView view_of(const AttackerObservation& obs, const ActiveSubgraph& active) {
  ActiveView view;
  const std::size_t n = obs.size();
  view.adj.resize(n);
  view.link_sum.assign(n, 0);
  view.tx.resize(n);
  const std::uint64_t floor = background_floor(obs);
  for (std::size_t i = 0; i < n; ++i) view.tx[i] = obs.node_tx[i] - floor;
  for (const Link& l : active.links) {
    const auto c = obs.link_count(l.a, l.b);
    view.adj[l.a.index()].push_back(l.b);
    view.adj[l.b.index()].push_back(l.a);
    view.link_sum[l.a.index()] += c;
    view.link_sum[l.b.index()] += c;
  }
  for (auto& a : view.adj) std::sort(a.begin(), a.end());
  return view;
}

}  // namespace

std::vector<Chain> extract_chains(const AttackerObservation& obs, const ActiveSubgraph& active) {
  const ActiveView view = view_of(obs, active);
  std::set<Link> walked;
  std::vector<Chain> chains;
  for (NodeId start : active.nodes) {
    if (!view.terminal(start)) continue;
    for (NodeId first : view.adj[start.index()]) {
      if (walked.count(Link::of(start, first))) continue;
      std::vector<NodeId> seq{start};
      NodeId prev = start;
      NodeId cur = first;
      walked.insert(Link::of(start, first));
      while (!view.terminal(cur)) {
        seq.push_back(cur);
        const auto& nb = view.adj[cur.index()];
        const NodeId next = nb[0] == prev ? nb[1] : nb[0];
        walked.insert(Link::of(cur, next));
        prev = cur;
        cur = next;
      }
      seq.push_back(cur);
      Chain chain;
      chain.rate = obs.link_count(seq[0], seq[1]);
      // Orient from the end with net outflow.
      const bool reversed = view.imbalance(seq.back()) > view.imbalance(seq.front());
      if (reversed) std::reverse(seq.begin(), seq.end());
      chain.nodes = std::move(seq);
      chains.push_back(std::move(chain));
    }
  }
  std::sort(chains.begin(), chains.end(),
            [](const Chain& a, const Chain& b) { return a.nodes < b.nodes; });
  return chains;
}

CandidateSets endpoint_candidates(const AttackerObservation& obs) {
  CandidateSets out;
  const ActiveSubgraph active = active_subgraph(obs);
  if (active.empty()) return out;
  out.chains = extract_chains(obs, active);
  std::set<NodeId> sources, dests;
  for (const Chain& c : out.chains) {
    std::vector<NodeId> s, d;
    if (obs.scheme == SchemeFamily::kExtrapolated) {
      s.assign(c.transmitters().begin(), c.transmitters().end());
      d.assign(c.receivers().begin(), c.receivers().end());
    } else {
      s.push_back(c.nodes.front());
      d.push_back(c.nodes.back());
    }
    sources.insert(s.begin(), s.end());
    dests.insert(d.begin(), d.end());
    out.chain_sources.push_back(std::move(s));
    out.chain_dests.push_back(std::move(d));
  }
  out.sources.assign(sources.begin(), sources.end());
  out.dests.assign(dests.begin(), dests.end());
  return out;
}

AttackVerdict guess_endpoints(const CandidateSets& candidates, Rng& rng) {
  AttackVerdict v;
  v.gs = candidates.sources.size();
  v.gd = candidates.dests.size();
  if (candidates.chains.empty()) return v;
  v.chain = rng.below(candidates.chains.size());
  v.chosen_chain = candidates.chains[v.chain].nodes;
  v.source_guess = rng.pick<NodeId>(candidates.chain_sources[v.chain]);
  v.dest_guess = rng.pick<NodeId>(candidates.chain_dests[v.chain]);
  return v;
}

AttackVerdict attack(const AttackerObservation& obs, Rng& rng) {
  return guess_endpoints(endpoint_candidates(obs), rng);
}

double uniformity_score(std::span<const double> counts) {
  if (counts.empty()) return 1.0;
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= static_cast<double>(counts.size());
  if (mean == 0.0) return 1.0;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= static_cast<double>(counts.size());
  const double cv = std::sqrt(var) / mean;
  return 1.0 - std::clamp(cv, 0.0, 1.0);
}

double unlinkability_score(const AttackerObservation& obs) {
  const ActiveSubgraph active = active_subgraph(obs);
  const std::uint64_t floor = background_floor(obs);
  std::vector<double> counts;
  for (NodeId v : active.nodes) {
    const auto c = obs.tx(v) - floor;
    if (c > 0) counts.push_back(static_cast<double>(c));
  }
  return uniformity_score(counts);
}

}  // namespace extrout
