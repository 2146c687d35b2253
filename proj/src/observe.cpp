#include "extrout/observe.hpp"

#include <algorithm>

namespace extrout {

AttackerObservation observe(const TrafficTrace& trace, const Topology& topo,
                            SchemeFamily scheme) {
  if (trace.node_tx.size() != topo.size())
    throw std::invalid_argument("observe: trace and topology sizes differ");
  AttackerObservation obs;
  obs.scheme = scheme;
  obs.intervals = trace.intervals;
  obs.positions.assign(topo.positions().begin(), topo.positions().end());
  obs.links.assign(topo.links().begin(), topo.links().end());
  obs.node_tx = trace.node_tx;
  obs.link_tx = trace.link_tx;
  return obs;
}

}  // namespace extrout
