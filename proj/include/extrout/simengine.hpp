#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "extrout/protocols.hpp"
#include "extrout/topology.hpp"

namespace extrout {

// Attacker evidence plus the bookkeeping only the simulator knows.
struct TrafficTrace {
  std::vector<std::uint64_t> node_tx;  // indexed by NodeId::index()
  std::map<Link, std::uint64_t> link_tx;
  std::uint64_t intervals = 0;
  std::uint64_t delivered_real = 0;

  std::uint64_t total() const;
  std::uint64_t tx(NodeId id) const { return node_tx.at(id.index()); }
  bool operator==(const TrafficTrace&) const = default;
};

struct TimedEvent {
  std::uint64_t interval = 0;
  double time = 0.0;  // interval + jitter offset
  TransmissionEvent event;
};

struct RunOptions {
  // Offsets of each event inside its interval, uniform in [0, jitter). Timing
  // does not change any count.
  double jitter = 0.0;
  std::function<void(const TimedEvent&)> observer;
};

// Steps ceil(packet_budget / source_rate) intervals of the plan's schedule on an
// idealised lossless broadcast medium.
TrafficTrace run(const ScenarioPlan& plan, std::uint64_t packet_budget, std::uint64_t seed,
                 const RunOptions& options = {});
TrafficTrace run(const ScenarioPlan& plan, std::uint64_t seed);

// total / (intervals * source_rate * L).
double measured_tof(const TrafficTrace& trace, const ScenarioPlan& plan);

// Node and link counts the plan's schedule implies for trace.intervals, compared
// exactly. One message per mismatching node or link.
std::vector<std::string> check_trace(const TrafficTrace& trace, const ScenarioPlan& plan);

class MatrixUnavailable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major grid of per-node counts (or averages of counts).
struct TrafficMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> cells;

  double at(int r, int c) const { return cells.at(static_cast<std::size_t>(r * cols + c)); }
  bool operator==(const TrafficMatrix&) const = default;
};

TrafficMatrix transmission_matrix(const TrafficTrace& trace, const TopologyParams& params);
TrafficMatrix mean_matrix(const std::vector<TrafficMatrix>& runs);

// `# intervals=N` header, then `node_id,tx_count` rows.
void write_trace_csv(std::ostream& out, const TrafficTrace& trace,
                     const std::vector<std::string>& comments = {});
TrafficTrace read_trace_csv(std::istream& in);

// Companion link counts, `a,b,tx_count` rows.
void write_link_csv(std::ostream& out, const TrafficTrace& trace,
                    const std::vector<std::string>& comments = {});
void read_link_csv(std::istream& in, TrafficTrace& trace);

void write_matrix_csv(std::ostream& out, const TrafficMatrix& m,
                      const std::vector<std::string>& comments = {});
TrafficMatrix read_matrix_csv(std::istream& in);

// Ten glyph levels, ' ' for zero through '@' for the maximum.
std::string ascii_heatmap(const TrafficMatrix& m);

}  // namespace extrout
