#pragma once

#include "extrout/observation.hpp"
#include "extrout/simengine.hpp"

namespace extrout {

// Projection onto what the eavesdropper sees: counts, positions, links and
// the publicly known scheme family. delivered_real and all plan data stay
// behind.
AttackerObservation observe(const TrafficTrace& trace, const Topology& topo,
                            SchemeFamily scheme);

}  // namespace extrout
