#include "extrout/observation.hpp"

#include <json.hpp>

namespace extrout {

const char* to_string(SchemeFamily family) {
  return family == SchemeFamily::kExtrapolated ? "extrapolated" : "endpoints_exposed";
}

std::uint64_t AttackerObservation::link_count(NodeId u, NodeId v) const {
  auto it = link_tx.find(Link::of(u, v));
  return it == link_tx.end() ? 0 : it->second;
}

std::string to_json(const AttackerObservation& obs) {
  nlohmann::json j;
  j["scheme"] = to_string(obs.scheme);
  j["intervals"] = obs.intervals;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    nodes.push_back({{"id", i + 1},
                     {"x", obs.positions.at(i).x},
                     {"y", obs.positions.at(i).y},
                     {"tx", obs.node_tx[i]}});
  }
  auto& links = j["links"] = nlohmann::json::array();
  for (const Link& l : obs.links) {
    links.push_back({{"a", l.a.value}, {"b", l.b.value}, {"tx", obs.link_count(l.a, l.b)}});
  }
  return j.dump();
}

}  // namespace extrout
