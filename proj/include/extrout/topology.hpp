#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "extrout/rng.hpp"

namespace extrout {

// 1-based node index, stable for the lifetime of a topology.
struct NodeId {
  std::uint32_t value = 0;

  constexpr std::size_t index() const { return value - 1; }
  static constexpr NodeId from_index(std::size_t i) {
    return NodeId{static_cast<std::uint32_t>(i + 1)};
  }
  constexpr bool valid() const { return value != 0; }
  auto operator<=>(const NodeId&) const = default;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

// Unordered node pair, stored with first < second.
struct Link {
  NodeId a;
  NodeId b;

  static Link of(NodeId u, NodeId v) { return u < v ? Link{u, v} : Link{v, u}; }
  auto operator<=>(const Link&) const = default;
};

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TopologyParams {
  int grid_rows = 20;
  int grid_cols = 20;
  double spacing = 100.0;       // grid pitch, meters
  double perturbation = 0.25;   // p: per-axis offset is at most p * spacing
  double range = 145.0;         // R, meters
  double qudg_factor = 0.25;    // a: links are certain below a * R
  std::uint64_t seed = 1;

  int node_count() const { return grid_rows * grid_cols; }
  double width() const { return grid_cols * spacing; }
  double height() const { return grid_rows * spacing; }

  // Throws TopologyError when a field is out of its domain.
  void validate() const;
};

struct GridCell {
  int row = 0;
  int col = 0;
};

// Immutable node placement plus symmetric link set.
class Topology {
 public:
  // `grid` marks that node i sits at grid cell (i / cols, i % cols).
  Topology(TopologyParams params, std::vector<Position> positions,
           std::vector<Link> links, bool grid);

  // Hand-built topology with no grid semantics (tests, fixtures).
  static Topology from_links(std::vector<Position> positions,
                             std::vector<Link> links);

  std::size_t size() const { return positions_.size(); }
  const TopologyParams& params() const { return params_; }
  bool is_grid() const { return grid_; }

  const Position& position(NodeId id) const { return positions_.at(id.index()); }
  std::span<const Position> positions() const { return positions_; }
  std::span<const Link> links() const { return links_; }
  // Sorted ascending.
  std::span<const NodeId> neighbors(NodeId id) const { return adjacency_.at(id.index()); }
  std::size_t degree(NodeId id) const { return neighbors(id).size(); }
  bool linked(NodeId u, NodeId v) const;
  bool contains(NodeId id) const { return id.valid() && id.value <= size(); }

  std::optional<GridCell> cell(NodeId id) const;
  bool on_boundary(NodeId id) const;

  std::vector<NodeId> nodes() const;

 private:
  TopologyParams params_;
  std::vector<Position> positions_;
  std::vector<Link> links_;
  std::vector<std::vector<NodeId>> adjacency_;
  bool grid_ = false;
};

// Perturbed grid: the node at cell (r, c) is drawn uniformly within
// +/- p * spacing of (c * spacing, r * spacing) on each axis, then clamped to
// the deployment area [0, W] x [0, H].
std::vector<Position> place_nodes(const TopologyParams& params, Rng& rng);

// Quasi-unit-disk link probability: 1 below aR, 0 from R on, linear between.
double link_probability(double d, double range, double qudg_factor);

// Visits pairs (i, j), i < j, in ascending order and keeps each link with
// link_probability(d). Only pairs in the uncertain band consume randomness.
Topology build_qudg(std::vector<Position> positions, const TopologyParams& params,
                    Rng& rng);

// Convenience: placement and links from the named streams of params.seed.
Topology generate_topology(const TopologyParams& params);

// Mean degree over interior (non-boundary) grid nodes; over all nodes when the
// topology has no interior.
double average_degree(const Topology& topo);

// Parameters of an unperturbed lattice whose links are exactly the four grid
// neighbours (100 m pitch, R = 141 m, a = 0.75).
TopologyParams lattice_params(int rows, int cols, std::uint64_t seed = 1);

// Plain-text format: optional '#' comment lines, header `N R a p spacing seed`,
// N lines `id x y`, then one `i j` line per link. A `# grid=RxC` comment
// restores the grid shape on import.
void write_topology(std::ostream& out, const Topology& topo,
                    std::span<const std::string> comments = {});
Topology read_topology(std::istream& in);

}  // namespace extrout
