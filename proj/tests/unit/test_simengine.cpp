#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "extrout/adversary.hpp"
#include "extrout/observe.hpp"
#include "extrout/simengine.hpp"

using namespace extrout;

namespace {

std::shared_ptr<const Topology> lattice() {
  return std::make_shared<const Topology>(generate_topology(lattice_params(20, 20)));
}

NodeId at(int row, int col) { return NodeId::from_index(static_cast<std::size_t>(row * 20 + col)); }

ScenarioPlan plan_for(const ProtocolVariant& v, std::uint64_t seed = 1) {
  ScenarioParams p;
  p.ks = 3;
  p.kd = 4;
  Rng rng(seed);
  return build_scenario(lattice(), at(10, 5), at(10, 13), v, p, rng);
}

}  // namespace

TEST_CASE("no-privacy run: each path node carries the budget") {
  const auto plan = plan_for(ProtocolVariant::no_privacy());
  const auto trace = run(plan, 7000, 1);
  CHECK(trace.intervals == 7000);
  CHECK(trace.delivered_real == 7000);
  CHECK(trace.total() == 7000u * 8);
  for (std::size_t i = 0; i + 1 < plan.real_path.nodes.size(); ++i)
    CHECK(trace.tx(plan.real_path.nodes[i]) == 7000);
  CHECK(trace.tx(plan.dest) == 0);
  CHECK(measured_tof(trace, plan) == 1.0);
}

TEST_CASE("baseline run: 15 transmitting nodes, 105000 transmissions") {
  const auto plan = plan_for(ProtocolVariant::baseline());
  const auto trace = run(plan, 7000, 1);
  int busy = 0;
  for (auto c : trace.node_tx) {
    CHECK((c == 0 || c == 7000));
    busy += c == 7000;
  }
  CHECK(busy == 15);
  CHECK(trace.total() == 105000);
  CHECK(measured_tof(trace, plan) == 1.875);
  CHECK(trace.delivered_real == 7000);
  CHECK(check_trace(trace, plan).empty());
}

TEST_CASE("duplicate run doubles the traffic") {
  const auto plan = plan_for(ProtocolVariant::duplicates(1));
  REQUIRE(plan.complete());
  const auto trace = run(plan, 7000, 1);
  CHECK(trace.total() == 7000u * static_cast<unsigned>(plan.accounting().total_hops()));
  CHECK(measured_tof(trace, plan) == tof(plan.accounting()));
}

TEST_CASE("residual cover reaches every node") {
  auto plan = plan_for(ProtocolVariant::baseline());
  plan.variant.residual_cover_rate = 1.0;
  const auto trace = run(plan, 500, 1);
  for (auto c : trace.node_tx) CHECK(c >= trace.intervals);
  CHECK(check_trace(trace, plan).empty());

  plan.variant.residual_cover_rate = 0.25;
  const auto frac = run(plan, 10, 1);
  CHECK(frac.tx(at(0, 0)) == 2);  // floor(10 * 0.25)
  CHECK(check_trace(frac, plan).empty());
}

TEST_CASE("source rate sets the number of intervals") {
  auto plan = plan_for(ProtocolVariant::baseline());
  plan.source_rate = 3;
  const auto trace = run(plan, 7000, 1);
  CHECK(trace.intervals == 2334);
  CHECK(trace.delivered_real == 7000);
}

TEST_CASE("idle network: zero matrix") {
  auto plan = plan_for(ProtocolVariant::baseline());
  const auto trace = run(plan, 0, 1);
  CHECK(trace.total() == 0);
  const auto m = transmission_matrix(trace, plan.topology->params());
  CHECK(m.rows == 20);
  CHECK(std::all_of(m.cells.begin(), m.cells.end(), [](double c) { return c == 0; }));
  CHECK(active_subgraph(observe(trace, *plan.topology, plan.scheme())).empty());
}

TEST_CASE("same seed, same trace; jitter never changes a count") {
  const auto plan = plan_for(ProtocolVariant::duplicates(1));
  CHECK(run(plan, 700, 4) == run(plan, 700, 4));

  std::vector<double> times;
  RunOptions opt;
  opt.jitter = 0.5;
  opt.observer = [&](const TimedEvent& e) { times.push_back(e.time); };
  const auto jittered = run(plan, 700, 4, opt);
  CHECK(jittered == run(plan, 700, 4));
  REQUIRE(times.size() == jittered.total());
  bool offset = false;
  for (std::size_t i = 0; i < times.size(); ++i) offset = offset || times[i] != std::floor(times[i]);
  CHECK(offset);
}

TEST_CASE("conservation on every transmitting hop") {
  const auto plan = plan_for(ProtocolVariant::fake(1));
  REQUIRE(plan.complete());
  const auto trace = run(plan, 7000, 1);
  for (const auto& p : plan.active_paths())
    for (std::size_t i = 0; i + 1 < p.route->nodes.size(); ++i)
      CHECK(trace.link_tx.at(Link::of(p.route->nodes[i], p.route->nodes[i + 1])) == 7000);
  // No node repeats across paths, so every active count equals the budget.
  std::vector<double> active;
  for (auto c : trace.node_tx)
    if (c) active.push_back(static_cast<double>(c));
  CHECK(uniformity_score(active) == 1.0);
}

TEST_CASE("check_trace names a perturbed node or link") {
  const auto plan = plan_for(ProtocolVariant::baseline());
  auto trace = run(plan, 100, 1);
  auto bumped = trace;
  ++bumped.node_tx[plan.source.index()];
  const auto msgs = check_trace(bumped, plan);
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].find("node " + std::to_string(plan.source.value)) == 0);

  auto extra = trace;
  extra.link_tx[Link::of(at(0, 0), at(0, 1))] = 3;
  CHECK(check_trace(extra, plan).size() == 1);
}

TEST_CASE("trace, link and matrix files round-trip") {
  const auto plan = plan_for(ProtocolVariant::duplicates(1));
  const auto trace = run(plan, 700, 1);

  std::stringstream t, l;
  write_trace_csv(t, trace, {"made in a test"});
  write_link_csv(l, trace);
  TrafficTrace back = read_trace_csv(t);
  CHECK(back.intervals == trace.intervals);
  CHECK(back.node_tx == trace.node_tx);
  read_link_csv(l, back);
  CHECK(back.link_tx == trace.link_tx);

  const auto m = transmission_matrix(trace, plan.topology->params());
  std::stringstream ms;
  write_matrix_csv(ms, m, {"x"});
  CHECK(read_matrix_csv(ms) == m);
  CHECK(m.at(10, 5) == 700);
}

TEST_CASE("mean matrix") {
  TrafficMatrix a{1, 2, {1, 2}}, b{1, 2, {3, 6}};
  CHECK(mean_matrix({a, b}) == TrafficMatrix{1, 2, {2, 4}});
  CHECK_THROWS(mean_matrix({}));
  CHECK_THROWS(mean_matrix({a, TrafficMatrix{2, 1, {1, 1}}}));
}

TEST_CASE("matrix view needs a grid topology") {
  TrafficTrace t;
  t.node_tx = {1, 2, 3};
  TopologyParams p;
  CHECK_THROWS_AS(transmission_matrix(t, p), MatrixUnavailable);
}

TEST_CASE("heatmap glyphs") {
  const std::string h = ascii_heatmap(TrafficMatrix{1, 3, {0, 5, 10}});
  CHECK(h.front() == ' ');
  CHECK(h.find('@') != std::string::npos);
}
