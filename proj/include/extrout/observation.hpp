#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "extrout/topology.hpp"

namespace extrout {

// Which family of scheme is deployed. The scheme itself is public; only the
// real endpoints and the extension lengths are secret.
enum class SchemeFamily {
  kEndpointsExposed,  // flows start at their source and end at their sink
  kExtrapolated,      // flows run anchor to anchor around the real endpoints
};

const char* to_string(SchemeFamily family);

// Everything a global passive eavesdropper sees: who transmitted, how often,
// over which link, and where every node is. No packet kinds, no routes, no
// identity of the real endpoints.
struct AttackerObservation {
  SchemeFamily scheme = SchemeFamily::kExtrapolated;
  std::uint64_t intervals = 0;
  std::vector<Position> positions;
  std::vector<Link> links;
  std::vector<std::uint64_t> node_tx;           // indexed by NodeId::index()
  std::map<Link, std::uint64_t> link_tx;

  std::size_t size() const { return node_tx.size(); }
  std::uint64_t tx(NodeId id) const { return node_tx.at(id.index()); }
  std::uint64_t link_count(NodeId u, NodeId v) const;
};

// JSON rendering, used to audit that no privileged field can leak.
std::string to_json(const AttackerObservation& obs);

}  // namespace extrout
