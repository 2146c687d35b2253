#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "extrout/observation.hpp"
#include "extrout/rng.hpp"

// Global passive adversary. Everything here is a function of an
// AttackerObservation; this library does not link against scenario or
// simulation code, so it cannot see packet kinds or routes.
namespace extrout {

struct ActiveSubgraph {
  std::vector<NodeId> nodes;
  std::vector<Link> links;

  bool empty() const { return nodes.empty(); }
};

// Transmissions every node shows regardless of flows (residual cover).
std::uint64_t background_floor(const AttackerObservation& obs);

// Half the busiest link's count, at least 1.
std::uint64_t default_threshold(const AttackerObservation& obs);

// Links whose count reaches `threshold`, their endpoints, and any node whose
// count above the background floor reaches it.
ActiveSubgraph active_subgraph(const AttackerObservation& obs,
                               std::optional<std::uint64_t> threshold = std::nullopt);

// A maximal flow segment between two terminal nodes (where inflow and outflow
// differ), oriented upstream to downstream.
struct Chain {
  std::vector<NodeId> nodes;

  std::span<const NodeId> transmitters() const { return {nodes.data(), nodes.size() - 1}; }
  std::span<const NodeId> receivers() const { return {nodes.data() + 1, nodes.size() - 1}; }
  std::uint64_t rate = 0;  // per-link count along the chain (its first link)
};

std::vector<Chain> extract_chains(const AttackerObservation& obs, const ActiveSubgraph& active);

struct CandidateSets {
  std::vector<Chain> chains;
  // Per chain, aligned with `chains`.
  std::vector<std::vector<NodeId>> chain_sources;
  std::vector<std::vector<NodeId>> chain_dests;
  // Unions over all chains, sorted.
  std::vector<NodeId> sources;
  std::vector<NodeId> dests;
};

// Exposed endpoints make the chain ends the only candidates. Under
// extrapolation every transmitter of a rate-uniform chain may be the source and
// every receiver the destination.
CandidateSets endpoint_candidates(const AttackerObservation& obs);

struct AttackVerdict {
  std::optional<NodeId> source_guess;
  std::optional<NodeId> dest_guess;
  std::size_t gs = 0;  // |source candidates|
  std::size_t gd = 0;  // |destination candidates|
  std::size_t chain = 0;
  std::vector<NodeId> chosen_chain;
  // Filled by whoever knows the ground truth.
  bool correct_source = false;
  bool correct_dest = false;
  bool correct_path = false;
};

// Picks a chain uniformly, then a source candidate and a destination
// candidate on it uniformly and independently.
AttackVerdict guess_endpoints(const CandidateSets& candidates, Rng& rng);
AttackVerdict attack(const AttackerObservation& obs, Rng& rng);

// 1 - coefficient of variation, clamped to [0, 1].
double uniformity_score(std::span<const double> counts);

// uniformity_score over the active transmitting nodes, background removed.
double unlinkability_score(const AttackerObservation& obs);

}  // namespace extrout
