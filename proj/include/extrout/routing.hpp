#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "extrout/rng.hpp"
#include "extrout/topology.hpp"

namespace extrout {

class UnreachableError : public std::runtime_error {
 public:
  UnreachableError(NodeId from, NodeId to);
};

// Simple path; consecutive nodes are linked.
struct Route {
  std::vector<NodeId> nodes;

  int hops() const { return nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1; }
  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }
  bool contains(NodeId id) const;
  bool operator==(const Route&) const = default;
};

// True when the route is nonempty, simple and every hop is a topology link.
bool is_valid_route(const Topology& topo, const Route& route);

// Comma-separated node ids, e.g. "4,5,6".
std::string format_route(const Route& route);
Route parse_route(const std::string& text);

// Hop distances from `from` to every node; -1 where unreachable.
std::vector<int> hop_distances(const Topology& topo, NodeId from);

std::optional<int> hop_distance(const Topology& topo, NodeId u, NodeId v);

// Minimum-hop path; among those, the lexicographically smallest node sequence.
// Throws UnreachableError.
Route shortest_path(const Topology& topo, NodeId s, NodeId d);

// All-pairs hop table for repeated queries on one topology.
class HopTable {
 public:
  explicit HopTable(const Topology& topo);

  int at(NodeId u, NodeId v) const { return dist_[u.index() * n_ + v.index()]; }
  std::span<const int> from(NodeId u) const {
    return {dist_.data() + u.index() * n_, n_};
  }
  // Same tie-breaking as shortest_path.
  Route path(const Topology& topo, NodeId s, NodeId d) const;

 private:
  std::size_t n_;
  std::vector<int> dist_;
};

// A shortest S-D path embedded in an anchor-to-anchor route:
//   route.nodes = anchor_s ... S ... D ... anchor_d
struct ExtendedRoute {
  Route route;
  std::size_t s_index = 0;
  std::size_t d_index = 0;
  int ks = 0;  // achieved source-side extension
  int kd = 0;  // achieved destination-side extension
  int requested_ks = 0;
  int requested_kd = 0;

  NodeId source() const { return route.nodes[s_index]; }
  NodeId dest() const { return route.nodes[d_index]; }
  NodeId anchor_source() const { return route.front(); }
  NodeId anchor_dest() const { return route.back(); }
  int core_hops() const { return static_cast<int>(d_index - s_index); }
  Route core() const;

  bool fully_extended() const { return ks == requested_ks && kd == requested_kd; }
  // Step 1 had no candidate on a side that asked for a positive extension.
  bool source_blocked() const { return requested_ks > 0 && ks == 0; }
  bool dest_blocked() const { return requested_kd > 0 && kd == 0; }
};

struct ExtensionOptions {
  // Strict: the node added at step k must sit exactly L + k hops from the far
  // endpoint. Lenient: any unused neighbour.
  bool strict = true;
  // Nodes the extension may not use (other active paths).
  std::span<const NodeId> avoid = {};
  // Precomputed distances, used instead of two BFS runs when given.
  const HopTable* table = nullptr;
};

// Extends `route` (a shortest S -> D path) one hop at a time, ks hops before S
// and kd hops after D. Candidate ties are drawn from `rng`. Stops early on a
// side with no candidate and records what was achieved.
ExtendedRoute extrapolate(const Topology& topo, const Route& route, int ks, int kd,
                          Rng& rng, const ExtensionOptions& options = {});

enum class DisjointStatus { kComplete, kShortfall, kNone };

struct DisjointPathSet {
  std::vector<Route> paths;
  int requested = 0;
  DisjointStatus status = DisjointStatus::kNone;

  bool shortfall() const { return status != DisjointStatus::kComplete; }
};

const char* to_string(DisjointStatus status);

// Up to j anchor-to-anchor routes, pairwise internally vertex-disjoint and
// avoiding the interior of `excluded` and every node in `avoid`. Successive
// shortest augmentations on the unit-capacity split graph, so the set found
// has minimum total hops for its cardinality. Sorted by (hops, node sequence).
DisjointPathSet disjoint_paths(const Topology& topo, NodeId anchor_s, NodeId anchor_d,
                               int j, const Route& excluded,
                               std::span<const NodeId> avoid = {});

}  // namespace extrout
