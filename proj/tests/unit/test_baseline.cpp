#include <random>

#include "doctest.h"
#include "greensr/baseline.hpp"
#include "support.hpp"

using namespace greensr;
using testsupport::make_six_node_example;

namespace {

Network hub_with_ports(int backbone, int access) {
  // One router with `backbone` deactivatable ports to peers plus `access`
  // always-on ports, single-port links.
  NetworkBuilder b;
  const NodeId hub = b.add_node("hub");
  for (int i = 0; i < backbone; ++i) {
    const NodeId peer = b.add_node("p" + std::to_string(i));
    b.add_link(hub, peer, {10.0});
  }
  for (int i = 0; i < access; ++i) {
    const NodeId cust = b.add_node("c" + std::to_string(i));
    b.add_link(hub, cust, {10.0}, 1.0, 1.0, PortRole::access);
  }
  return b.build();
}

}  // namespace

TEST_CASE("spr baseline removes whole ports while theta holds") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u");
  const NodeId v = b.add_node("v");
  b.add_link(u, v, {25.0, 25.0, 25.0, 25.0});
  Network net = b.build();
  auto table = compute_flow_fractions(net);

  SUBCASE("load 30 on 100 capacity keeps two ports") {
    TrafficMatrix tm(2);
    tm.set(u, v, 30.0);  // needs ceil(30 / (0.7*25)) = 2 active
    const SrConfiguration cfg = spr_baseline(net, tm, table, 0.7);
    CHECK(cfg.ports_inactive == 2);
    CHECK(cfg.mlu == doctest::Approx(30.0 / 50.0));
    CHECK(cfg.warnings.empty());
  }

  SUBCASE("idle backbone links lose every port") {
    const SrConfiguration cfg = spr_baseline(net, TrafficMatrix(2), table, 0.7);
    CHECK(cfg.ports_inactive == 4);
  }

  SUBCASE("links above theta keep all ports and get flagged") {
    TrafficMatrix tm(2);
    tm.set(u, v, 90.0);  // 0.9 > theta at full capacity
    const SrConfiguration cfg = spr_baseline(net, tm, table, 0.7);
    CHECK(cfg.ports_inactive == 0);
    REQUIRE(!cfg.warnings.empty());
    CHECK(cfg.mlu == doctest::Approx(0.9));
  }
}

TEST_CASE("baseline removes smallest ports first to maximize the count") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u");
  const NodeId v = b.add_node("v");
  b.add_link(u, v, {5.0, 5.0, 40.0});
  Network net = b.build();
  auto table = compute_flow_fractions(net);
  TrafficMatrix tm(2);
  tm.set(u, v, 28.0);  // 0.7 * 40 = 28: the big port alone suffices
  const SrConfiguration cfg = spr_baseline(net, tm, table, 0.7);
  CHECK(cfg.ports_inactive == 2);
  CHECK(!cfg.plan.is_port_active(0));
  CHECK(!cfg.plan.is_port_active(1));
  CHECK(cfg.plan.is_port_active(2));
}

TEST_CASE("linecard packing follows the floor rule per router") {
  SUBCASE("14 deactivatable plus 6 access endpoints free one card") {
    Network net = hub_with_ports(14, 6);
    ActivationPlan plan = ActivationPlan::all_active(net);
    for (const Port& p : net.ports()) {
      if (p.role == PortRole::backbone) plan.port_active[p.id] = 0;
    }
    pack_linecards(net, plan, 8);
    int hub_cards_total = 0;
    int hub_cards_off = 0;
    for (const Linecard& c : net.linecards()) {
      if (c.router != 0) continue;
      ++hub_cards_total;
      if (!plan.is_card_active(c.id)) ++hub_cards_off;
    }
    CHECK(hub_cards_total == 3);  // ceil(20 / 8)
    CHECK(hub_cards_off == 1);    // floor(14 / 8)
    CHECK(validate_plan(net, plan).empty());
  }

  SUBCASE("16 inactive endpoints free two cards, 7 free none") {
    Network net16 = hub_with_ports(16, 0);
    ActivationPlan plan16 = ActivationPlan::all_active(net16);
    for (const Port& p : net16.ports()) plan16.port_active[p.id] = 0;
    pack_linecards(net16, plan16, 8);
    int off = 0;
    for (const Linecard& c : net16.linecards()) {
      if (c.router == 0 && !plan16.is_card_active(c.id)) ++off;
    }
    CHECK(off == 2);

    Network net7 = hub_with_ports(7, 0);
    ActivationPlan plan7 = ActivationPlan::all_active(net7);
    for (const Port& p : net7.ports()) plan7.port_active[p.id] = 0;
    pack_linecards(net7, plan7, 8);
    for (const Linecard& c : net7.linecards()) {
      if (c.router == 0) CHECK(plan7.is_card_active(c.id));
    }
  }
}

TEST_CASE("packing is monotone in the number of inactive ports") {
  Network net = hub_with_ports(12, 0);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ActivationPlan fewer = ActivationPlan::all_active(net);
    ActivationPlan more = ActivationPlan::all_active(net);
    for (const Port& p : net.ports()) {
      const bool off = (rng() & 1) != 0;
      if (off) {
        more.port_active[p.id] = 0;
        if (rng() & 1) fewer.port_active[p.id] = 0;
      }
    }
    pack_linecards(net, fewer, 8);
    pack_linecards(net, more, 8);
    CHECK(more.inactive_card_count() >= fewer.inactive_card_count());
  }
}

TEST_CASE("mlu evaluation rejects traffic on dead links") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u");
  const NodeId v = b.add_node("v");
  b.add_link(u, v, {10.0});
  Network net = b.build();
  ActivationPlan plan = ActivationPlan::all_active(net);
  plan.port_active[0] = 0;
  std::vector<double> load(net.arcs().size(), 0.0);
  load[0] = 1.0;
  CHECK_THROWS_AS(evaluate_mlu(net, plan, load), std::runtime_error);
  load[0] = 0.0;
  const MluReport rep = evaluate_mlu(net, plan, load);
  CHECK(rep.mlu == doctest::Approx(0.0));
}

TEST_CASE("six-node consolidated routing evaluates to the published loads") {
  auto ex = make_six_node_example();
  auto table = compute_flow_fractions(ex.net);
  SplitPlan splits = spr_splits(ex.demands);
  for (auto& s : splits) {
    if (s.dst == ex.f && (s.src == ex.a || s.src == ex.b)) {
      s.via = {{ex.c, 1.0}};
    }
  }
  const auto load = arc_traffic(table, ex.demands, splits);
  ActivationPlan plan = ActivationPlan::all_active(ex.net);
  for (LinkId l : {ex.ab, ex.be, ex.ef}) {
    plan.port_active[ex.net.link(l).ports.front()] = 0;
  }
  pack_linecards(ex.net, plan, 8);
  const MluReport rep = evaluate_mlu(ex.net, plan, load);
  CHECK(rep.utilization[ex.net.link(ex.cd).forward] == doctest::Approx(0.7));
  CHECK(rep.mlu == doctest::Approx(0.7));
}

TEST_CASE("energy saving is the linecard share times the inactive fraction") {
  Network net = hub_with_ports(10, 0);
  ActivationPlan plan = ActivationPlan::all_active(net);

  SUBCASE("everything on saves nothing") {
    const EnergyReport rep = energy_report(net, plan, 0.8);
    CHECK(rep.saving == doctest::Approx(0.0));
  }

  SUBCASE("seventy percent of cards off saves fifty-six percent") {
    // Constructed plan: 7 of 10 cards off.
    NetworkBuilder b;
    const NodeId hub = b.add_node("hub");
    for (int i = 0; i < 10; ++i) {
      const NodeId peer = b.add_node("p" + std::to_string(i));
      b.add_link(hub, peer, {10.0});
    }
    Network star = b.build(1);  // one endpoint per card at the hub
    ActivationPlan p2 = ActivationPlan::all_active(star);
    int off = 0;
    for (const Linecard& c : star.linecards()) {
      if (c.router == 0 && off < 7) {
        p2.card_active[c.id] = 0;
        ++off;
      }
    }
    // 10 hub cards + 10 peer cards; deactivate 7 peers' cards too so the
    // global fraction is 14/20 = 0.7.
    off = 0;
    for (const Linecard& c : star.linecards()) {
      if (c.router != 0 && off < 7) {
        p2.card_active[c.id] = 0;
        ++off;
      }
    }
    const EnergyReport rep = energy_report(star, p2, 0.8);
    CHECK(rep.linecards_total == 20);
    CHECK(rep.linecards_inactive == 14);
    CHECK(rep.saving == doctest::Approx(0.8 * 0.7));
  }

  SUBCASE("all cards off saves exactly the linecard share") {
    for (auto& s : plan.card_active) s = 0;
    for (auto& s : plan.port_active) s = 0;
    const EnergyReport rep = energy_report(net, plan, 0.8);
    CHECK(rep.saving == doctest::Approx(0.8));
  }
}

TEST_CASE("baseline plans validate and agree with arc_traffic loads") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    NetworkBuilder b;
    const int n = 8;
    for (int i = 0; i < n; ++i) b.add_node("n" + std::to_string(i));
    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      b.add_link(pick(rng), i, {30.0, 30.0, 30.0});
    }
    b.add_link(0, n - 1, {30.0, 30.0});
    Network net = b.build();
    TrafficMatrix tm(n);
    for (int k = 0; k < 12; ++k) {
      const NodeId u = rng() % n;
      const NodeId v = rng() % n;
      if (u != v) tm.set(u, v, 1.0 + (rng() % 12));
    }
    auto table = compute_flow_fractions(net);
    const SrConfiguration cfg = spr_baseline(net, tm, table, 0.7);
    CHECK(validate_plan(net, cfg.plan).empty());
    const auto loads = arc_traffic(table, tm, cfg.splits);
    for (size_t a = 0; a < loads.size(); ++a) {
      CHECK(loads[a] == doctest::Approx(cfg.arc_load[a]));
    }
    // No deactivation may push a direction above theta.
    for (const Arc& arc : net.arcs()) {
      const double cap = net.arc_capacity(arc.id, cfg.plan);
      if (cap > 0.0 && cfg.warnings.empty()) {
        CHECK(loads[arc.id] <= 0.7 * cap + 1e-9);
      }
    }
  }
}
