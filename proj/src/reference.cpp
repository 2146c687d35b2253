#include "extrout/reference.hpp"

#include <memory>
#include <stdexcept>

#include "extrout/adversary.hpp"
#include "extrout/observe.hpp"

namespace extrout {

std::vector<ReferenceCase> reference_cases() {
  std::vector<ReferenceCase> cases;
  auto base = [](std::string label, ProtocolVariant v) {
    ReferenceCase c;
    c.label = std::move(label);
    c.variant = v;
    c.L = 8;
    c.ks = 3;
    c.kd = 4;
    return c;
  };
  {
    auto c = base("baseline_l8_ks3_kd4", ProtocolVariant::baseline());
    c.reported = {c.label, 0.933, 1.875, ""};
    cases.push_back(c);
  }
  {
    auto c = base("one_duplicate", ProtocolVariant::duplicates(1));
    c.duplicate_hops = {15};
    c.reported = {c.label, 0.967, 3.75, ""};
    cases.push_back(c);
  }
  {
    auto c = base("two_duplicates", ProtocolVariant::duplicates(2));
    c.duplicate_hops = {15, 15};
    c.reported = {c.label, 0.978, 5.625, ""};
    cases.push_back(c);
  }
  {
    auto c = base("five_total_paths", ProtocolVariant::duplicates(4));
    c.duplicate_hops = {14, 16, 16, 19};
    c.reported = {c.label, 0.987, 10.0,
                  "the five path lengths 14, 15, 16, 16, 19 are the whole active set: the "
                  "15-hop path is the main extended route and the other four are duplicates "
                  "(80 hops in total)"};
    cases.push_back(c);
  }
  {
    auto c = base("extended_fake_path", ProtocolVariant::fake(1));
    c.fake_hops = {17};
    c.reported = {c.label, 0.983, 4.25,
                  "closed forms applied to a 15-hop main and a 17-hop fake extended path "
                  "(32 hops); no reading recovers both reported values"};
    cases.push_back(c);
  }
  {
    ReferenceCase c;
    c.label = "one_fake_pair_l12";
    c.variant = ProtocolVariant::nfake(1);
    c.L = 12;
    c.fake_pair_lengths = {13};
    c.reported = {c.label, 0.5, 2.08, "only (12 + 13) / 12 rounds to the reported TOF"};
    cases.push_back(c);
  }
  return cases;
}

const ReferenceCase& reference_case(const std::string& label) {
  static const std::vector<ReferenceCase> cases = reference_cases();
  for (const auto& c : cases)
    if (c.label == label) return c;
  throw std::invalid_argument("unknown reference case: " + label);
}

namespace {

class BundleBuilder {
 public:
  NodeId add(double x, double y) {
    positions_.push_back({x, y});
    return NodeId::from_index(positions_.size() - 1);
  }
  void link(NodeId a, NodeId b) { links_.push_back(Link::of(a, b)); }

  // Chain of `hops` links laid out on row `row`; returns all nodes.
  Route chain(int hops, int row) {
    Route r;
    for (int i = 0; i <= hops; ++i) {
      r.nodes.push_back(add(100.0 * i, 100.0 * row));
      if (i) link(r.nodes[static_cast<std::size_t>(i - 1)], r.nodes.back());
    }
    return r;
  }

  // Path between two existing nodes through hops - 1 fresh nodes on `row`.
  Route bridge(NodeId from, NodeId to, int hops, int row) {
    Route r{{from}};
    for (int i = 1; i < hops; ++i) {
      r.nodes.push_back(add(100.0 * i, 100.0 * row));
      link(r.nodes[static_cast<std::size_t>(i - 1)], r.nodes.back());
    }
    link(r.nodes.back(), to);
    r.nodes.push_back(to);
    return r;
  }

  std::shared_ptr<const Topology> build() {
    return std::make_shared<const Topology>(Topology::from_links(positions_, links_));
  }

 private:
  std::vector<Position> positions_;
  std::vector<Link> links_;
};

ExtendedRoute embed(Route route, int ks, int kd) {
  ExtendedRoute e;
  e.route = std::move(route);
  e.ks = e.requested_ks = ks;
  e.kd = e.requested_kd = kd;
  e.s_index = static_cast<std::size_t>(ks);
  e.d_index = static_cast<std::size_t>(e.route.hops() - kd);
  return e;
}

}  // namespace

ScenarioPlan reference_plan(const ReferenceCase& c) {
  BundleBuilder b;
  const bool ext = c.variant.extrapolated();
  const int main_hops = ext ? c.ks + c.L + c.kd : c.L;
  Route main = b.chain(main_hops, 0);
  int row = 1;
  std::vector<Route> dups;
  for (int h : c.duplicate_hops) dups.push_back(b.bridge(main.front(), main.back(), h, row++));
  std::vector<Route> fakes;
  for (int h : c.fake_hops) fakes.push_back(b.chain(h, row++));
  std::vector<Route> pairs;
  for (int h : c.fake_pair_lengths) pairs.push_back(b.chain(h, row++));

  ScenarioPlan plan;
  plan.topology = b.build();
  plan.variant = c.variant;
  if (ext) {
    plan.main = embed(main, c.ks, c.kd);
    plan.real_path = plan.main->core();
  } else {
    plan.real_path = main;
  }
  plan.source = plan.real_path.front();
  plan.dest = plan.real_path.back();
  plan.duplicates = dups;
  if (!dups.empty()) plan.duplicate_status = DisjointStatus::kComplete;
  for (auto& f : fakes) {
    // Fake endpoints L hops apart, centred on the fake extended path.
    const int spare = f.hops() - c.L;
    plan.fake_paths.push_back(embed(f, spare / 2, spare - spare / 2));
  }
  for (auto& p : pairs) plan.fake_pairs.push_back({p.front(), p.back(), p});
  validate_plan(plan);
  return plan;
}

ReferenceOutcome evaluate_reference(const ReferenceCase& c, std::uint64_t budget,
                                    std::uint64_t seed) {
  ReferenceOutcome out{c, reference_plan(c), {}, {}, {}};
  out.trace = run(out.plan, budget, seed);
  out.report = make_report(c.variant.name(), out.plan.accounting());
  out.report.tof_measured = measured_tof(out.trace, out.plan);
  out.report.unlinkability =
      unlinkability_score(observe(out.trace, *out.plan.topology, out.plan.scheme()));
  out.report.reported = c.reported;
  if (!c.reported.interpretation.empty()) out.report.notes.push_back(c.reported.interpretation);
  out.reconciliation = reconcile(out.report);
  return out;
}

}  // namespace extrout
