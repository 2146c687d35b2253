#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "extrout/protocols.hpp"
#include "extrout/reference.hpp"
#include "extrout/simengine.hpp"

using namespace extrout;

namespace {

std::shared_ptr<const Topology> lattice(int rows = 20, int cols = 20) {
  return std::make_shared<const Topology>(generate_topology(lattice_params(rows, cols)));
}

NodeId at(int row, int col, int cols = 20) {
  return NodeId::from_index(static_cast<std::size_t>(row * cols + col));
}

ScenarioParams fixed(int ks, int kd) {
  ScenarioParams p;
  p.ks = ks;
  p.kd = kd;
  return p;
}

std::set<NodeId> senders(const TransmissionSchedule& s) {
  std::set<NodeId> out;
  for (const auto& e : s.per_interval) out.insert(e.sender);
  return out;
}

}  // namespace

TEST_CASE("no-privacy plan is the bare shortest path") {
  auto t = lattice();
  Rng rng(1);
  const auto plan = build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::no_privacy(), {}, rng);
  CHECK(plan.L() == 8);
  CHECK_FALSE(plan.main.has_value());
  CHECK(plan.duplicates.empty());
  CHECK(plan.fake_paths.empty());
  CHECK(plan.fake_pairs.empty());
  CHECK(plan.complete());
  CHECK(plan.scheme() == SchemeFamily::kEndpointsExposed);
  const auto sched = dummy_schedule(plan);
  CHECK(sched.per_interval.size() == 8);
  CHECK(tof(plan.accounting()) == 1.0);
}

TEST_CASE("baseline plan, L=8, Ks=3, Kd=4") {
  auto t = lattice();
  Rng rng(2);
  const auto plan =
      build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::baseline(), fixed(3, 4), rng);
  REQUIRE(plan.main.has_value());
  CHECK(plan.main->route.hops() == 15);
  CHECK(plan.complete());
  CHECK(plan.scheme() == SchemeFamily::kExtrapolated);
  validate_plan(plan);

  const auto sched = dummy_schedule(plan);
  CHECK(sched.per_interval.size() == 15);
  CHECK(static_cast<double>(sched.per_interval.size()) / plan.L() == 1.875);
  int real = 0;
  for (const auto& e : sched.per_interval) real += e.kind == EventKind::kReal;
  CHECK(real == 8);
  // Exactly the non-terminal nodes of the route transmit.
  const auto& nodes = plan.main->route.nodes;
  CHECK(senders(sched) == std::set<NodeId>(nodes.begin(), nodes.end() - 1));
}

TEST_CASE("drawn extension lengths stay in the configured interval") {
  auto t = lattice();
  ScenarioParams p;
  p.k_min = 2;
  p.k_max = 4;
  std::set<int> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto plan = build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::baseline(), p, rng);
    CHECK(plan.main->requested_ks >= 2);
    CHECK(plan.main->requested_ks <= 4);
    CHECK(plan.main->requested_kd >= 2);
    CHECK(plan.main->requested_kd <= 4);
    seen.insert(plan.main->requested_ks);
  }
  CHECK(seen == std::set<int>{2, 3, 4});
}

TEST_CASE("duplicates share the anchors and nothing else") {
  auto t = lattice();
  for (int n = 1; n <= 3; ++n) {
    Rng rng(static_cast<std::uint64_t>(n));
    const auto plan = build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::duplicates(n),
                                     fixed(3, 4), rng);
    REQUIRE(plan.complete());
    REQUIRE(plan.duplicates.size() == static_cast<std::size_t>(n));
    validate_plan(plan);
    std::set<NodeId> interior(plan.main->route.nodes.begin() + 1, plan.main->route.nodes.end() - 1);
    for (const auto& d : plan.duplicates) {
      CHECK(d.front() == plan.main->anchor_source());
      CHECK(d.back() == plan.main->anchor_dest());
      for (std::size_t i = 1; i + 1 < d.nodes.size(); ++i) CHECK(interior.insert(d.nodes[i]).second);
    }
    const auto sched = dummy_schedule(plan);
    CHECK(static_cast<int>(sched.per_interval.size()) == plan.accounting().total_hops());
  }
}

TEST_CASE("one 15-hop duplicate: two 15-hop paths and TOF 3.75") {
  const auto plan = reference_plan(reference_case("one_duplicate"));
  REQUIRE(plan.main.has_value());
  CHECK(plan.main->route.hops() == 15);
  REQUIRE(plan.duplicates.size() == 1);
  CHECK(plan.duplicates[0].hops() == 15);
  const auto sched = dummy_schedule(plan);
  CHECK(sched.per_interval.size() == 30);
  CHECK(static_cast<double>(sched.per_interval.size()) / plan.L() == 3.75);
}

TEST_CASE("fake pair lands in the far half of a symmetric grid") {
  auto t = lattice();
  // Real route along the left column.
  const Route real = shortest_path(*t, at(2, 0), at(14, 0));
  REQUIRE(real.hops() == 12);
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const FakePair f = place_fake_pair(*t, real, 12, rng);
    CHECK(std::abs(f.route.hops() - 12) <= 1);
    for (NodeId v : f.route.nodes) CHECK(t->cell(v)->col >= 10);
  }
}

TEST_CASE("fake pairs on 50 random topologies: length, disjointness, optimality") {
  int checked = 0;
  for (std::uint64_t g = 0; checked < 50; ++g) {
    TopologyParams p;
    p.grid_rows = 9;
    p.grid_cols = 9;
    p.range = 220;
    p.seed = 300 + g;
    const Topology t = generate_topology(p);
    Rng rng(g);
    const NodeId s = NodeId::from_index(rng.below(t.size()));
    const NodeId d = NodeId::from_index(rng.below(t.size()));
    const auto L = hop_distance(t, s, d);
    if (s == d || !L || *L < 3) continue;
    const Route real = shortest_path(t, s, d);

    // Exhaustive: best achievable score among pairs within one hop.
    const HopTable table(t);
    const std::set<NodeId> on_real(real.nodes.begin(), real.nodes.end());
    double best = -1;
    for (NodeId a : t.nodes())
      for (NodeId b : t.nodes()) {
        const int lf = table.at(a, b);
        if (a == b || lf < 1 || std::abs(lf - *L) > 1) continue;
        const Route r = table.path(t, a, b);
        bool clear = true;
        for (NodeId v : r.nodes) clear = clear && !on_real.count(v);
        if (!clear) continue;
        const std::size_t h = static_cast<std::size_t>(r.hops());
        Position mid = t.position(r.nodes[h / 2]);
        if (h % 2) {
          const Position q = t.position(r.nodes[h / 2 + 1]);
          mid = {(mid.x + q.x) / 2, (mid.y + q.y) / 2};
        }
        double score = std::numeric_limits<double>::infinity();
        for (NodeId v : real.nodes) score = std::min(score, distance(mid, t.position(v)));
        best = std::max(best, score);
      }

    FakePair f;
    try {
      f = place_fake_pair(t, real, *L, rng, {}, &table);
    } catch (const NoPlacementError&) {
      CHECK(best < 0);
      continue;
    }
    ++checked;
    CHECK(is_valid_route(t, f.route));
    CHECK(f.route.front() == f.source);
    CHECK(f.route.back() == f.dest);
    CHECK(hop_distance(t, f.source, f.dest) == f.route.hops());
    for (NodeId v : f.route.nodes) CHECK_FALSE(on_real.count(v));
    if (best >= 0) {
      CHECK(std::abs(f.route.hops() - *L) <= 1);
      double score = std::numeric_limits<double>::infinity();
      const std::size_t h = static_cast<std::size_t>(f.route.hops());
      Position mid = t.position(f.route.nodes[h / 2]);
      if (h % 2) {
        const Position q = t.position(f.route.nodes[h / 2 + 1]);
        mid = {(mid.x + q.x) / 2, (mid.y + q.y) / 2};
      }
      for (NodeId v : real.nodes) score = std::min(score, distance(mid, t.position(v)));
      CHECK(score == doctest::Approx(best).epsilon(1e-9));
    } else {
      CHECK(std::abs(f.route.hops() - *L) <= 2);
    }
  }
}

TEST_CASE("no placement when nothing avoids the real route") {
  auto t = lattice(1, 6);
  const Route real = shortest_path(*t, NodeId{2}, NodeId{5});
  Rng rng(1);
  CHECK_THROWS_AS(place_fake_pair(*t, real, 3, rng), NoPlacementError);
}

TEST_CASE("N-fake plan keeps fakes off the real path") {
  auto t = lattice();
  for (int n = 1; n <= 3; ++n) {
    Rng rng(static_cast<std::uint64_t>(40 + n));
    const auto plan = build_scenario(t, at(4, 4), at(4, 16), ProtocolVariant::nfake(n), {}, rng);
    REQUIRE(plan.complete());
    CHECK(plan.L() == 12);
    CHECK(plan.fake_pairs.size() == static_cast<std::size_t>(n));
    validate_plan(plan);
    std::set<NodeId> used(plan.real_path.nodes.begin(), plan.real_path.nodes.end());
    for (const auto& f : plan.fake_pairs) {
      CHECK(std::abs(f.route.hops() - 12) <= 1);
      for (NodeId v : f.route.nodes) CHECK(used.insert(v).second);
    }
    CHECK(plan.scheme() == SchemeFamily::kEndpointsExposed);
  }
}

TEST_CASE("fake extended paths are extrapolated and avoid every other path") {
  auto t = lattice();
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const auto plan =
        build_scenario(t, at(4, 4), at(4, 12), ProtocolVariant::fake(2), fixed(3, 4), rng);
    REQUIRE(plan.complete());
    REQUIRE(plan.fake_paths.size() == 2);
    validate_plan(plan);
    std::set<NodeId> used(plan.main->route.nodes.begin(), plan.main->route.nodes.end());
    for (const auto& f : plan.fake_paths) {
      CHECK(f.fully_extended());
      CHECK(f.requested_ks >= 2);
      CHECK(f.requested_ks <= 5);
      CHECK(std::abs(f.core_hops() - 8) <= 1);
      for (NodeId v : f.route.nodes) CHECK(used.insert(v).second);
      CHECK(std::find(f.route.nodes.begin(), f.route.nodes.end(), plan.source) == f.route.nodes.end());
      CHECK(std::find(f.route.nodes.begin(), f.route.nodes.end(), plan.dest) == f.route.nodes.end());
    }
  }
}

TEST_CASE("schedule is the union of non-terminal path nodes") {
  auto t = lattice();
  Rng rng(9);
  const auto plan =
      build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::duplicates(2), fixed(2, 2), rng);
  const auto sched = dummy_schedule(plan);
  std::set<NodeId> want;
  for (const auto& p : plan.active_paths())
    want.insert(p.route->nodes.begin(), p.route->nodes.end() - 1);
  CHECK(senders(sched) == want);
  CHECK(sched.residual_rate == 0.0);
  for (const auto& e : sched.per_interval) {
    REQUIRE(e.next_hop.has_value());
    CHECK(t->linked(e.sender, *e.next_hop));
  }
}

TEST_CASE("link padding rule") {
  CHECK(pad_link(5, 3) == 3);
  CHECK(pad_link(3, 3) == 3);
  CHECK(pad_link(0, 0) == 0);
  CHECK_THROWS(pad_link(2, 3));
  CHECK_THROWS(pad_link(2, -1));
}

TEST_CASE("padding leaves a single-flow schedule unchanged") {
  auto t = lattice();
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng a(s), b(s);
    ScenarioParams off = fixed(3, 4), on = fixed(3, 4);
    on.link_padding = true;
    const auto p1 = build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::baseline(), off, a);
    const auto p2 = build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::baseline(), on, b);
    CHECK(dummy_schedule(p1).per_interval == dummy_schedule(p2).per_interval);
  }
}

TEST_CASE("padding adds cover where flows merge") {
  // 1 and 2 both feed 3 and can hear each other; 1 carries twice the rate.
  const Topology t = Topology::from_links(
      {{0, 0}, {50, 0}, {25, 40}},
      {Link::of(NodeId{1}, NodeId{2}), Link::of(NodeId{1}, NodeId{3}), Link::of(NodeId{2}, NodeId{3})});
  TransmissionSchedule s;
  s.per_interval = {{NodeId{1}, NodeId{3}, EventKind::kReal},
                    {NodeId{1}, NodeId{3}, EventKind::kDummy},
                    {NodeId{2}, NodeId{3}, EventKind::kDummy}};
  apply_link_padding(s, t);
  REQUIRE(s.per_interval.size() == 4);
  CHECK(s.per_interval[3] == TransmissionEvent{NodeId{1}, NodeId{2}, EventKind::kDummy});
}

TEST_CASE("plan validation catches broken invariants") {
  auto t = lattice();
  Rng rng(3);
  auto plan = build_scenario(t, at(4, 4), at(4, 16), ProtocolVariant::nfake(1), {}, rng);
  validate_plan(plan);
  ScenarioPlan broken = plan;
  broken.fake_pairs[0].route.nodes.push_back(plan.dest);
  CHECK_THROWS_AS(validate_plan(broken), std::invalid_argument);
  broken = plan;
  broken.real_path.nodes.erase(broken.real_path.nodes.begin() + 2);
  CHECK_THROWS_AS(validate_plan(broken), std::invalid_argument);
}

TEST_CASE("plan text lists routes and endpoints") {
  auto t = lattice();
  Rng rng(5);
  const auto plan =
      build_scenario(t, at(10, 5), at(10, 13), ProtocolVariant::baseline(), fixed(3, 4), rng);
  const std::string text = to_text(plan);
  CHECK(text.find("main_route = " + format_route(plan.main->route)) != std::string::npos);
  CHECK(text.find("s_index = 3") != std::string::npos);
  CHECK(text.find("d_index = 11") != std::string::npos);
}

TEST_CASE("scenario errors") {
  auto t = lattice(3, 3);
  Rng rng(1);
  CHECK_THROWS(build_scenario(t, NodeId{1}, NodeId{1}, ProtocolVariant::baseline(), {}, rng));
  CHECK_THROWS(build_scenario(t, NodeId{1}, NodeId{99}, ProtocolVariant::baseline(), {}, rng));
  CHECK_THROWS(build_scenario(t, NodeId{1}, NodeId{2}, ProtocolVariant::duplicates(0), {}, rng));
  auto split = std::make_shared<const Topology>(Topology::from_links({{0, 0}, {500, 0}}, {}));
  CHECK_THROWS_AS(build_scenario(split, NodeId{1}, NodeId{2}, ProtocolVariant::baseline(), {}, rng),
                  UnreachableError);
}
