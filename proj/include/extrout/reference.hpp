#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "extrout/metrics.hpp"
#include "extrout/protocols.hpp"
#include "extrout/simengine.hpp"

namespace extrout {

// A published configuration expressed as explicit path lengths, with the
// values that were reported for it.
struct ReferenceCase {
  std::string label;
  ProtocolVariant variant;
  int L = 0;
  int ks = 0;
  int kd = 0;
  std::vector<int> duplicate_hops;
  std::vector<int> fake_hops;
  std::vector<int> fake_pair_lengths;
  ReportedValues reported;
};

std::vector<ReferenceCase> reference_cases();
const ReferenceCase& reference_case(const std::string& label);

// Abstract topology made of exactly the case's paths (duplicates share the
// main route's anchors, fakes are separate components) and the plan on it.
ScenarioPlan reference_plan(const ReferenceCase& c);

struct ReferenceOutcome {
  ReferenceCase input;
  ScenarioPlan plan;
  TrafficTrace trace;
  PrivacyReport report;
  Reconciliation reconciliation;
};

// Builds, simulates and reconciles one case.
ReferenceOutcome evaluate_reference(const ReferenceCase& c, std::uint64_t budget = 7000,
                                    std::uint64_t seed = 1);

}  // namespace extrout
