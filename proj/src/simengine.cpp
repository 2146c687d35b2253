#include "extrout/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace extrout {

std::uint64_t TrafficTrace::total() const {
  std::uint64_t t = 0;
  for (auto c : node_tx) t += c;
  return t;
}

TrafficTrace run(const ScenarioPlan& plan, std::uint64_t packet_budget, std::uint64_t seed,
                 const RunOptions& options) {
  if (!plan.topology) throw std::invalid_argument("run: plan has no topology");
  const Topology& topo = *plan.topology;
  const TransmissionSchedule sched = dummy_schedule(plan);
  const auto rate = static_cast<std::uint64_t>(plan.source_rate);

  TrafficTrace trace;
  trace.node_tx.assign(topo.size(), 0);
  trace.intervals = (packet_budget + rate - 1) / rate;

  // Map every scheduled hop to a counter slot once.
  std::vector<std::uint64_t*> link_slot(sched.per_interval.size(), nullptr);
  for (std::size_t i = 0; i < sched.per_interval.size(); ++i) {
    const auto& e = sched.per_interval[i];
    if (e.next_hop) link_slot[i] = &trace.link_tx[Link::of(e.sender, *e.next_hop)];
  }
  const bool timed = static_cast<bool>(options.observer);
  Rng jitter_rng = Rng::stream(seed, "jitter");

  std::uint64_t real_left = packet_budget;
  const double residual = sched.residual_rate;
  for (std::uint64_t t = 0; t < trace.intervals; ++t) {
    for (std::size_t i = 0; i < sched.per_interval.size(); ++i) {
      const auto& e = sched.per_interval[i];
      ++trace.node_tx[e.sender.index()];
      if (link_slot[i]) ++*link_slot[i];
      if (timed) {
        const double off = options.jitter > 0 ? jitter_rng.uniform(0.0, options.jitter) : 0.0;
        options.observer({t, static_cast<double>(t) + off, e});
      }
    }
    if (residual > 0.0) {
      // Integer part every interval, fractional part accumulated deterministically.
      const auto emitted = static_cast<std::uint64_t>(std::floor((t + 1) * residual)) -
                           static_cast<std::uint64_t>(std::floor(t * residual));
      for (std::size_t n = 0; n < trace.node_tx.size(); ++n) {
        trace.node_tx[n] += emitted;
        if (timed)
          for (std::uint64_t k = 0; k < emitted; ++k)
            options.observer({t, static_cast<double>(t),
                              {NodeId::from_index(n), std::nullopt, EventKind::kResidual}});
      }
    }
    const auto sent = std::min(rate, real_left);
    real_left -= sent;
    trace.delivered_real += sent;
  }
  return trace;
}

TrafficTrace run(const ScenarioPlan& plan, std::uint64_t seed) {
  return run(plan, static_cast<std::uint64_t>(plan.packet_budget), seed);
}

double measured_tof(const TrafficTrace& trace, const ScenarioPlan& plan) {
  const double baseline = static_cast<double>(trace.intervals) * plan.source_rate * plan.L();
  if (baseline <= 0) throw std::invalid_argument("measured_tof: empty baseline");
  return static_cast<double>(trace.total()) / baseline;
}

std::vector<std::string> check_trace(const TrafficTrace& trace, const ScenarioPlan& plan) {
  std::vector<std::string> out;
  const Topology& topo = *plan.topology;
  if (trace.node_tx.size() != topo.size()) {
    out.push_back(fmt::format("trace has {} nodes, topology {}", trace.node_tx.size(), topo.size()));
    return out;
  }
  const TransmissionSchedule sched = dummy_schedule(plan);
  std::vector<std::uint64_t> node(topo.size(), 0);
  std::map<Link, std::uint64_t> link;
  for (const auto& e : sched.per_interval) {
    ++node[e.sender.index()];
    if (e.next_hop) ++link[Link::of(e.sender, *e.next_hop)];
  }
  const auto residual =
      static_cast<std::uint64_t>(std::floor(trace.intervals * sched.residual_rate));
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::uint64_t want = node[i] * trace.intervals + residual;
    if (trace.node_tx[i] != want)
      out.push_back(fmt::format("node {}: {} transmissions, schedule implies {}", i + 1,
                                trace.node_tx[i], want));
  }
  for (const auto& [l, c] : link) {
    const auto it = trace.link_tx.find(l);
    const std::uint64_t got = it == trace.link_tx.end() ? 0 : it->second;
    if (got != c * trace.intervals)
      out.push_back(fmt::format("link {}-{}: {} transmissions, schedule implies {}", l.a.value,
                                l.b.value, got, c * trace.intervals));
  }
  for (const auto& [l, c] : trace.link_tx)
    if (c && !link.count(l))
      out.push_back(fmt::format("link {}-{}: {} transmissions off schedule", l.a.value, l.b.value, c));
  return out;
}

TrafficMatrix transmission_matrix(const TrafficTrace& trace, const TopologyParams& params) {
  const auto cells = static_cast<std::size_t>(params.grid_rows) * params.grid_cols;
  if (params.grid_rows < 1 || params.grid_cols < 1 || cells != trace.node_tx.size())
    throw MatrixUnavailable("matrix view unavailable: trace is not from a grid topology");
  TrafficMatrix m{params.grid_rows, params.grid_cols, {}};
  m.cells.reserve(cells);
  for (auto c : trace.node_tx) m.cells.push_back(static_cast<double>(c));
  return m;
}

TrafficMatrix mean_matrix(const std::vector<TrafficMatrix>& runs) {
  if (runs.empty()) throw std::invalid_argument("mean_matrix: no runs");
  TrafficMatrix out = runs.front();
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].rows != out.rows || runs[k].cols != out.cols)
      throw std::invalid_argument("mean_matrix: shape mismatch");
    for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i] += runs[k].cells[i];
  }
  for (auto& c : out.cells) c /= static_cast<double>(runs.size());
  return out;
}

void write_trace_csv(std::ostream& out, const TrafficTrace& trace,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << fmt::format("# intervals={}\n", trace.intervals);
  out << "node_id,tx_count\n";
  for (std::size_t i = 0; i < trace.node_tx.size(); ++i)
    out << fmt::format("{},{}\n", i + 1, trace.node_tx[i]);
}

TrafficTrace read_trace_csv(std::istream& in) {
  TrafficTrace trace;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      unsigned long long v = 0;
      if (std::sscanf(line.c_str(), "# intervals=%llu", &v) == 1) trace.intervals = v;
      continue;
    }
    if (line.rfind("node_id", 0) == 0) continue;
    unsigned long long id = 0, count = 0;
    if (std::sscanf(line.c_str(), "%llu,%llu", &id, &count) != 2 ||
        id != trace.node_tx.size() + 1)
      throw std::invalid_argument(fmt::format("trace line {}: expected `node_id,tx_count`", lineno));
    trace.node_tx.push_back(count);
  }
  return trace;
}

void write_link_csv(std::ostream& out, const TrafficTrace& trace,
                    const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "a,b,tx_count\n";
  for (const auto& [link, count] : trace.link_tx)
    out << fmt::format("{},{},{}\n", link.a.value, link.b.value, count);
}

void read_link_csv(std::istream& in, TrafficTrace& trace) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("a,b", 0) == 0) continue;
    unsigned a = 0, b = 0;
    unsigned long long count = 0;
    if (std::sscanf(line.c_str(), "%u,%u,%llu", &a, &b, &count) != 3 || a == 0 || b == 0)
      throw std::invalid_argument(fmt::format("link line {}: expected `a,b,tx_count`", lineno));
    trace.link_tx[Link::of(NodeId{a}, NodeId{b})] = count;
  }
}

void write_matrix_csv(std::ostream& out, const TrafficMatrix& m,
                      const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) out << (c ? "," : "") << fmt::format("{}", m.at(r, c));
    out << '\n';
  }
}

TrafficMatrix read_matrix_csv(std::istream& in) {
  TrafficMatrix m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ls, cell, ',')) {
      m.cells.push_back(std::stod(cell));
      ++cols;
    }
    if (m.rows == 0) m.cols = cols;
    if (cols != m.cols) throw std::invalid_argument("matrix csv: ragged rows");
    ++m.rows;
  }
  return m;
}

std::string ascii_heatmap(const TrafficMatrix& m) {
  static constexpr char kGlyphs[] = " .:-=+*#%@";
  const double peak = m.cells.empty() ? 0.0 : *std::max_element(m.cells.begin(), m.cells.end());
  std::string out;
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      const double v = m.at(r, c);
      int level = 0;
      if (peak > 0 && v > 0) level = std::clamp(static_cast<int>(std::ceil(9.0 * v / peak)), 1, 9);
      out += kGlyphs[level];
    }
    out += '\n';
  }
  return out;
}

}  // namespace extrout
