#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "extrout/metrics.hpp"
#include "extrout/observation.hpp"
#include "extrout/rng.hpp"
#include "extrout/routing.hpp"
#include "extrout/topology.hpp"
#include "extrout/variant.hpp"

namespace extrout {

class NoPlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioParams {
  // Fixed extension lengths; when unset each is drawn from [k_min, k_max].
  std::optional<int> ks;
  std::optional<int> kd;
  int k_min = 2;
  int k_max = 5;
  bool strict = true;
  int source_rate = 1;  // real packets per interval
  int packet_budget = 7000;
  bool link_padding = false;
  // Return as soon as the main route's extension falls short, without placing
  // any decoys; such a plan is incomplete either way.
  bool abandon_incomplete = false;

  void validate() const;
};

struct FakePair {
  NodeId source;
  NodeId dest;
  Route route;
};

enum class PathRole { kMain, kDuplicate, kFakeExtended, kFakePair };

struct ActivePath {
  const Route* route = nullptr;
  PathRole role = PathRole::kMain;
  // Hop indices [first, last) that carry the real packet.
  std::optional<std::pair<std::size_t, std::size_t>> real_hops;
};

struct ScenarioPlan {
  std::shared_ptr<const Topology> topology;
  ProtocolVariant variant;
  NodeId source;
  NodeId dest;
  Route real_path;
  std::optional<ExtendedRoute> main;  // extrapolated variants only
  std::vector<Route> duplicates;
  std::optional<DisjointStatus> duplicate_status;
  std::vector<ExtendedRoute> fake_paths;
  std::vector<FakePair> fake_pairs;
  int source_rate = 1;
  int packet_budget = 7000;
  bool link_padding = false;
  std::vector<std::string> notes;

  int L() const { return real_path.hops(); }
  // The route carrying the real packet end to end.
  const Route& carrier() const { return main ? main->route : real_path; }
  std::vector<ActivePath> active_paths() const;
  PathAccounting accounting() const;
  SchemeFamily scheme() const {
    return variant.extrapolated() ? SchemeFamily::kExtrapolated
                                  : SchemeFamily::kEndpointsExposed;
  }
  // Every extension and placement achieved what was asked for.
  bool complete() const;
};

// Shortest route, then the variant's decoys. Routing errors propagate; a
// shortfall of disjoint paths or a truncated extension is recorded, not thrown.
ScenarioPlan build_scenario(std::shared_ptr<const Topology> topo, NodeId s, NodeId d,
                            const ProtocolVariant& variant, const ScenarioParams& params,
                            Rng& rng);

// Fake pair whose shortest path is within one hop of `target_hops` (then two),
// shares no node with `real_route` or `avoid`, and whose middle lies as far as
// possible from the real route. Equal scores are broken by `rng`. When
// `admissible` is given, the best-scoring candidate it accepts is returned.
FakePair place_fake_pair(const Topology& topo, const Route& real_route, int target_hops,
                         Rng& rng, std::span<const NodeId> avoid = {},
                         const HopTable* table = nullptr,
                         const std::function<bool(const FakePair&)>& admissible = {});

// Cover rate for the lower-rate link at a merge: node a sends dummies equal to
// the lower rate A2 over link a-b.
double pad_link(double rate_high, double rate_low);

enum class EventKind { kReal, kDummy, kResidual };

struct TransmissionEvent {
  NodeId sender;
  std::optional<NodeId> next_hop;  // none for residual broadcasts
  EventKind kind = EventKind::kDummy;
  bool operator==(const TransmissionEvent&) const = default;
};

// Steady-state schedule: the same events repeat every interval.
struct TransmissionSchedule {
  std::vector<TransmissionEvent> per_interval;
  double residual_rate = 0.0;  // per node per interval, on top of per_interval
  std::size_t node_count = 0;

  std::size_t path_events() const { return per_interval.size(); }
};

// One transmission per non-terminal node per active path per packet slot; the
// real packet occupies the S -> D hops of the carrier, everything else is a
// dummy. Link padding is applied when the plan asks for it.
TransmissionSchedule dummy_schedule(const ScenarioPlan& plan);

// Adds pad_link cover at every node where several flows merge.
void apply_link_padding(TransmissionSchedule& schedule, const Topology& topo);

// Throws std::invalid_argument naming the broken invariant.
void validate_plan(const ScenarioPlan& plan);

// key = value document with comma-separated route lists.
std::string to_text(const ScenarioPlan& plan);

}  // namespace extrout
