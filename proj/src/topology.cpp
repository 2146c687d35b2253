#include "extrout/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace extrout {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void TopologyParams::validate() const {
  if (grid_rows < 1 || grid_cols < 1)
    throw TopologyError("grid dimensions must be positive");
  if (!(spacing > 0.0)) throw TopologyError("spacing must be positive");
  if (!(perturbation >= 0.0 && perturbation <= 1.0))
    throw TopologyError("perturbation p must lie in [0, 1]");
  if (!(range > 0.0)) throw TopologyError("transmission range R must be positive");
  if (!(qudg_factor >= 0.0 && qudg_factor <= 1.0))
    throw TopologyError("Q-UDG factor a must lie in [0, 1]");
}

Topology::Topology(TopologyParams params, std::vector<Position> positions,
                   std::vector<Link> links, bool grid)
    : params_(params),
      positions_(std::move(positions)),
      links_(std::move(links)),
      adjacency_(positions_.size()),
      grid_(grid) {
  if (grid_ && static_cast<std::size_t>(params_.node_count()) != positions_.size())
    throw TopologyError("grid topology must have rows * cols nodes");
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
  for (const Link& l : links_) {
    if (l.a == l.b) throw TopologyError("self-link");
    if (!contains(l.a) || !contains(l.b)) throw TopologyError("link endpoint out of range");
    adjacency_[l.a.index()].push_back(l.b);
    adjacency_[l.b.index()].push_back(l.a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

Topology Topology::from_links(std::vector<Position> positions, std::vector<Link> links) {
  TopologyParams params;
  params.grid_rows = 1;
  params.grid_cols = static_cast<int>(positions.size());
  return Topology(params, std::move(positions), std::move(links), false);
}

bool Topology::linked(NodeId u, NodeId v) const {
  auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::optional<GridCell> Topology::cell(NodeId id) const {
  if (!grid_ || !contains(id)) return std::nullopt;
  const int i = static_cast<int>(id.index());
  return GridCell{i / params_.grid_cols, i % params_.grid_cols};
}

bool Topology::on_boundary(NodeId id) const {
  auto c = cell(id);
  if (!c) return false;
  return c->row == 0 || c->col == 0 || c->row == params_.grid_rows - 1 ||
         c->col == params_.grid_cols - 1;
}

std::vector<NodeId> Topology::nodes() const {
  std::vector<NodeId> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(NodeId::from_index(i));
  return out;
}

std::vector<Position> place_nodes(const TopologyParams& params, Rng& rng) {
  params.validate();
  const double offset = params.perturbation * params.spacing;
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(params.node_count()));
  for (int r = 0; r < params.grid_rows; ++r) {
    for (int c = 0; c < params.grid_cols; ++c) {
      const double gx = c * params.spacing;
      const double gy = r * params.spacing;
      // Draw both axes unconditionally so p = 0 consumes the same stream.
      const double dx = rng.uniform(-offset, offset);
      const double dy = rng.uniform(-offset, offset);
      out.push_back({std::clamp(gx + dx, 0.0, params.width()),
                     std::clamp(gy + dy, 0.0, params.height())});
    }
  }
  return out;
}

double link_probability(double d, double range, double qudg_factor) {
  if (d < 0.0) throw TopologyError("distance must be non-negative");
  if (!(range > 0.0)) throw TopologyError("transmission range R must be positive");
  if (!(qudg_factor >= 0.0 && qudg_factor <= 1.0))
    throw TopologyError("Q-UDG factor a must lie in [0, 1]");
  const double certain = qudg_factor * range;
  if (d < certain) return 1.0;
  if (d >= range) return 0.0;
  const double band = range - certain;
  if (!(band > 0.0)) throw TopologyError("degenerate Q-UDG band (a = 1)");
  return (range - d) / band;
}

Topology build_qudg(std::vector<Position> positions, const TopologyParams& params,
                    Rng& rng) {
  params.validate();
  if (positions.empty()) throw TopologyError("no nodes to connect");
  std::vector<Link> links;
  const std::size_t n = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(positions[i], positions[j]);
      const double p = link_probability(d, params.range, params.qudg_factor);
      const bool keep = p >= 1.0 || (p > 0.0 && rng.uniform01() < p);
      if (keep) links.push_back({NodeId::from_index(i), NodeId::from_index(j)});
    }
  }
  const bool grid = static_cast<std::size_t>(params.node_count()) == n;
  return Topology(params, std::move(positions), std::move(links), grid);
}

Topology generate_topology(const TopologyParams& params) {
  Rng placement = Rng::stream(params.seed, "placement");
  Rng links = Rng::stream(params.seed, "links");
  return build_qudg(place_nodes(params, placement), params, links);
}

double average_degree(const Topology& topo) {
  std::size_t count = 0;
  std::size_t total = 0;
  const bool has_interior =
      topo.is_grid() && topo.params().grid_rows >= 3 && topo.params().grid_cols >= 3;
  for (NodeId id : topo.nodes()) {
    if (has_interior && topo.on_boundary(id)) continue;
    ++count;
    total += topo.degree(id);
  }
  return count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count);
}

TopologyParams lattice_params(int rows, int cols, std::uint64_t seed) {
  TopologyParams p;
  p.grid_rows = rows;
  p.grid_cols = cols;
  p.spacing = 100.0;
  p.perturbation = 0.0;
  p.range = 141.0;
  p.qudg_factor = 0.75;
  p.seed = seed;
  return p;
}

void write_topology(std::ostream& out, const Topology& topo,
                    std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  const auto& p = topo.params();
  if (topo.is_grid()) out << fmt::format("# grid={}x{}\n", p.grid_rows, p.grid_cols);
  out << fmt::format("{} {} {} {} {} {}\n", topo.size(), p.range, p.qudg_factor,
                     p.perturbation, p.spacing, p.seed);
  for (NodeId id : topo.nodes()) {
    const Position& pos = topo.position(id);
    out << fmt::format("{} {} {}\n", id.value, pos.x, pos.y);
  }
  for (const Link& l : topo.links()) out << fmt::format("{} {}\n", l.a.value, l.b.value);
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw TopologyError(fmt::format("topology line {}: {}", line, what));
}

}  // namespace

Topology read_topology(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<std::pair<int, int>> grid;
  bool have_header = false;
  std::size_t n = 0;
  TopologyParams params;
  std::vector<Position> positions;
  std::vector<Link> links;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      int r = 0, c = 0;
      if (std::sscanf(line.c_str(), "# grid=%dx%d", &r, &c) == 2) grid = {r, c};
      continue;
    }
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> n >> params.range >> params.qudg_factor >> params.perturbation >>
            params.spacing >> params.seed))
        parse_fail(lineno, "expected header `N R a p spacing seed`");
      have_header = true;
      positions.reserve(n);
      continue;
    }
    if (positions.size() < n) {
      std::uint32_t id = 0;
      Position pos;
      if (!(ls >> id >> pos.x >> pos.y)) parse_fail(lineno, "expected `id x y`");
      if (id != positions.size() + 1) parse_fail(lineno, "node ids must be sequential from 1");
      positions.push_back(pos);
      continue;
    }
    std::uint32_t i = 0, j = 0;
    if (!(ls >> i >> j)) parse_fail(lineno, "expected `i j`");
    if (i == 0 || j == 0 || i > n || j > n) parse_fail(lineno, "link endpoint out of range");
    links.push_back(Link::of(NodeId{i}, NodeId{j}));
  }
  if (!have_header) throw TopologyError("topology: missing header");
  if (positions.size() != n) throw TopologyError("topology: truncated node list");

  if (grid && static_cast<std::size_t>(grid->first) * grid->second == n) {
    params.grid_rows = grid->first;
    params.grid_cols = grid->second;
    return Topology(params, std::move(positions), std::move(links), true);
  }
  params.grid_rows = 1;
  params.grid_cols = static_cast<int>(n);
  return Topology(params, std::move(positions), std::move(links), false);
}

}  // namespace extrout
