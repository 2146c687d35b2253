#include "extrout/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace extrout {

UnreachableError::UnreachableError(NodeId from, NodeId to)
    : std::runtime_error(fmt::format("node {} unreachable from node {}", to.value, from.value)) {}

bool Route::contains(NodeId id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

bool is_valid_route(const Topology& topo, const Route& route) {
  if (route.nodes.empty()) return false;
  std::vector<char> seen(topo.size(), 0);
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    const NodeId v = route.nodes[i];
    if (!topo.contains(v) || seen[v.index()]) return false;
    seen[v.index()] = 1;
    if (i > 0 && !topo.linked(route.nodes[i - 1], v)) return false;
  }
  return true;
}

std::string format_route(const Route& route) {
  std::string out;
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(route.nodes[i].value);
  }
  return out;
}

Route parse_route(const std::string& text) {
  Route r;
  if (text.empty()) return r;
  std::istringstream in(text + ",");
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty route token in '" + text + "'");
    std::size_t used = 0;
    const unsigned long v = std::stoul(tok, &used);
    if (used != tok.size() || v == 0) throw std::invalid_argument("bad route token: " + tok);
    r.nodes.push_back(NodeId{static_cast<std::uint32_t>(v)});
  }
  return r;
}

std::vector<int> hop_distances(const Topology& topo, NodeId from) {
  std::vector<int> dist(topo.size(), -1);
  if (!topo.contains(from)) throw TopologyError("unknown node");
  std::deque<NodeId> queue{from};
  dist[from.index()] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : topo.neighbors(u)) {
      if (dist[v.index()] >= 0) continue;
      dist[v.index()] = dist[u.index()] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

std::optional<int> hop_distance(const Topology& topo, NodeId u, NodeId v) {
  const int d = hop_distances(topo, u).at(v.index());
  if (d < 0) return std::nullopt;
  return d;
}

namespace {

// Walks from s towards d choosing the smallest-id neighbour one hop closer.
Route greedy_descent(const Topology& topo, NodeId s, NodeId d,
                     std::span<const int> dist_to_d) {
  if (dist_to_d[s.index()] < 0) throw UnreachableError(s, d);
  Route r;
  r.nodes.push_back(s);
  NodeId cur = s;
  while (cur != d) {
    const int want = dist_to_d[cur.index()] - 1;
    for (NodeId v : topo.neighbors(cur)) {
      if (dist_to_d[v.index()] == want) {
        cur = v;
        break;
      }
    }
    r.nodes.push_back(cur);
  }
  return r;
}

}  // namespace

Route shortest_path(const Topology& topo, NodeId s, NodeId d) {
  const auto dist = hop_distances(topo, d);
  return greedy_descent(topo, s, d, dist);
}

HopTable::HopTable(const Topology& topo) : n_(topo.size()), dist_(n_ * n_, -1) {
  for (NodeId u : topo.nodes()) {
    const auto row = hop_distances(topo, u);
    std::copy(row.begin(), row.end(), dist_.begin() + static_cast<std::ptrdiff_t>(u.index() * n_));
  }
}

Route HopTable::path(const Topology& topo, NodeId s, NodeId d) const {
  // Distances are symmetric, so the row of d is the distance-to-d field.
  return greedy_descent(topo, s, d, from(d));
}

Route ExtendedRoute::core() const {
  Route r;
  r.nodes.assign(route.nodes.begin() + static_cast<std::ptrdiff_t>(s_index),
                 route.nodes.begin() + static_cast<std::ptrdiff_t>(d_index) + 1);
  return r;
}

namespace {

std::vector<NodeId> extend_side(const Topology& topo, NodeId start, int k_max, int base,
                                std::span<const int> dist_to_far, bool strict,
                                std::vector<char>& used, Rng& rng) {
  std::vector<NodeId> out;
  NodeId tail = start;
  std::vector<NodeId> candidates;
  for (int k = 1; k <= k_max; ++k) {
    candidates.clear();
    for (NodeId m : topo.neighbors(tail)) {
      if (used[m.index()]) continue;
      if (strict && dist_to_far[m.index()] != base + k) continue;
      candidates.push_back(m);
    }
    if (candidates.empty()) break;
    const NodeId chosen = rng.pick<NodeId>(candidates);
    used[chosen.index()] = 1;
    out.push_back(chosen);
    tail = chosen;
  }
  return out;
}

}  // namespace

ExtendedRoute extrapolate(const Topology& topo, const Route& route, int ks, int kd,
                          Rng& rng, const ExtensionOptions& options) {
  if (ks < 0 || kd < 0) throw std::invalid_argument("extension lengths must be non-negative");
  if (!is_valid_route(topo, route)) throw std::invalid_argument("extrapolate: invalid route");
  const int L = route.hops();
  const NodeId s = route.front();
  const NodeId d = route.back();

  std::vector<char> used(topo.size(), 0);
  for (NodeId v : route.nodes) used[v.index()] = 1;
  for (NodeId v : options.avoid)
    if (topo.contains(v)) used[v.index()] = 1;

  std::vector<int> own_d, own_s;
  std::span<const int> dist_to_d, dist_to_s;
  if (options.strict) {
    if (options.table) {
      dist_to_d = options.table->from(d);
      dist_to_s = options.table->from(s);
    } else {
      own_d = hop_distances(topo, d);
      own_s = hop_distances(topo, s);
      dist_to_d = own_d;
      dist_to_s = own_s;
    }
    if (dist_to_d[s.index()] != L)
      throw std::invalid_argument("extrapolate: route is not a shortest path");
  }

  const auto before = extend_side(topo, s, ks, L, dist_to_d, options.strict, used, rng);
  const auto after = extend_side(topo, d, kd, L, dist_to_s, options.strict, used, rng);

  ExtendedRoute ext;
  ext.requested_ks = ks;
  ext.requested_kd = kd;
  ext.ks = static_cast<int>(before.size());
  ext.kd = static_cast<int>(after.size());
  ext.route.nodes.assign(before.rbegin(), before.rend());
  ext.route.nodes.insert(ext.route.nodes.end(), route.nodes.begin(), route.nodes.end());
  ext.route.nodes.insert(ext.route.nodes.end(), after.begin(), after.end());
  ext.s_index = before.size();
  ext.d_index = ext.s_index + static_cast<std::size_t>(L);
  return ext;
}

const char* to_string(DisjointStatus status) {
  switch (status) {
    case DisjointStatus::kComplete: return "complete";
    case DisjointStatus::kShortfall: return "shortfall";
    case DisjointStatus::kNone: return "none";
  }
  return "?";
}

namespace {

// Residual network for unit-capacity min-cost flow.
class FlowNetwork {
 public:
  struct Arc {
    int to;
    int cap;
    int cost;
    int rev;
    bool forward;
  };

  explicit FlowNetwork(int n) : arcs_(static_cast<std::size_t>(n)) {}

  void add(int from, int to, int cap, int cost) {
    auto& f = arcs_[static_cast<std::size_t>(from)];
    auto& t = arcs_[static_cast<std::size_t>(to)];
    f.push_back({to, cap, cost, static_cast<int>(t.size()), true});
    t.push_back({from, 0, -cost, static_cast<int>(f.size()) - 1, false});
  }

  // One unit along a cheapest residual path (Bellman-Ford with a FIFO queue,
  // residual costs can be negative). Returns false when the sink is cut off.
  bool augment(int source, int sink) {
    const int n = static_cast<int>(arcs_.size());
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<std::size_t>(n), kInf);
    std::vector<std::pair<int, int>> via(static_cast<std::size_t>(n), {-1, -1});
    std::vector<char> queued(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{source};
    dist[static_cast<std::size_t>(source)] = 0;
    queued[static_cast<std::size_t>(source)] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(u)] = 0;
      const auto& out = arcs_[static_cast<std::size_t>(u)];
      for (int i = 0; i < static_cast<int>(out.size()); ++i) {
        const Arc& a = out[static_cast<std::size_t>(i)];
        if (a.cap <= 0) continue;
        const int nd = dist[static_cast<std::size_t>(u)] + a.cost;
        if (nd < dist[static_cast<std::size_t>(a.to)]) {
          dist[static_cast<std::size_t>(a.to)] = nd;
          via[static_cast<std::size_t>(a.to)] = {u, i};
          if (!queued[static_cast<std::size_t>(a.to)]) {
            queued[static_cast<std::size_t>(a.to)] = 1;
            queue.push_back(a.to);
          }
        }
      }
    }
    if (dist[static_cast<std::size_t>(sink)] == kInf) return false;
    for (int v = sink; v != source;) {
      const auto [u, i] = via[static_cast<std::size_t>(v)];
      Arc& a = arcs_[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)];
      a.cap -= 1;
      arcs_[static_cast<std::size_t>(v)][static_cast<std::size_t>(a.rev)].cap += 1;
      v = u;
    }
    return true;
  }

  std::vector<Arc>& out(int u) { return arcs_[static_cast<std::size_t>(u)]; }

 private:
  std::vector<std::vector<Arc>> arcs_;
};

}  // namespace

DisjointPathSet disjoint_paths(const Topology& topo, NodeId anchor_s, NodeId anchor_d,
                               int j, const Route& excluded,
                               std::span<const NodeId> avoid) {
  if (j < 1) throw std::invalid_argument("disjoint_paths: j must be >= 1");
  if (!topo.contains(anchor_s) || !topo.contains(anchor_d) || anchor_s == anchor_d)
    throw std::invalid_argument("disjoint_paths: anchors must be distinct topology nodes");

  const std::size_t n = topo.size();
  std::vector<char> blocked(n, 0);
  for (std::size_t i = 1; i + 1 < excluded.nodes.size(); ++i)
    blocked[excluded.nodes[i].index()] = 1;
  for (NodeId v : avoid)
    if (topo.contains(v)) blocked[v.index()] = 1;
  blocked[anchor_s.index()] = 0;
  blocked[anchor_d.index()] = 0;

  // Node v splits into in = 2i and out = 2i + 1.
  auto in_of = [](NodeId v) { return static_cast<int>(2 * v.index()); };
  auto out_of = [](NodeId v) { return static_cast<int>(2 * v.index() + 1); };

  FlowNetwork net(static_cast<int>(2 * n));
  for (NodeId v : topo.nodes()) {
    if (blocked[v.index()] || v == anchor_s || v == anchor_d) continue;
    net.add(in_of(v), out_of(v), 1, 0);
  }
  for (const Link& l : topo.links()) {
    if (blocked[l.a.index()] || blocked[l.b.index()]) continue;
    net.add(out_of(l.a), in_of(l.b), 1, 1);
    net.add(out_of(l.b), in_of(l.a), 1, 1);
  }

  const int source = out_of(anchor_s);
  const int sink = in_of(anchor_d);
  int flow = 0;
  while (flow < j && net.augment(source, sink)) ++flow;

  // Consumes one unit of flow on a forward arc leaving `u` and returns its head.
  auto follow = [&net](int u) {
    for (auto& a : net.out(u)) {
      if (!a.forward) continue;
      auto& back = net.out(a.to)[static_cast<std::size_t>(a.rev)];
      if (back.cap <= 0) continue;
      back.cap -= 1;
      return a.to;
    }
    throw std::logic_error("disjoint_paths: broken flow decomposition");
  };

  DisjointPathSet result;
  result.requested = j;
  for (int p = 0; p < flow; ++p) {
    Route r;
    r.nodes.push_back(anchor_s);
    int cur = follow(source);
    while (true) {
      r.nodes.push_back(NodeId::from_index(static_cast<std::size_t>(cur / 2)));
      if (cur == sink) break;
      cur = follow(follow(cur));
    }
    result.paths.push_back(std::move(r));
  }
  std::sort(result.paths.begin(), result.paths.end(), [](const Route& x, const Route& y) {
    if (x.hops() != y.hops()) return x.hops() < y.hops();
    return x.nodes < y.nodes;
  });
  result.status = flow == j ? DisjointStatus::kComplete
                  : flow > 0 ? DisjointStatus::kShortfall
                             : DisjointStatus::kNone;
  return result;
}

}  // namespace extrout
