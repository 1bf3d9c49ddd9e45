#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "greensr/flow_fractions.hpp"
#include "support.hpp"

using namespace greensr;
using testsupport::make_six_node_example;

namespace {

// Independent single-destination accumulation used as the SPR-load oracle:
// plain Dijkstra toward each destination plus even splitting, written
// without the table machinery.
std::vector<double> spr_loads_oracle(const Network& net,
                                     const TrafficMatrix& tm) {
  const int n = net.node_count();
  std::vector<double> load(net.arcs().size(), 0.0);
  for (NodeId w = 0; w < n; ++w) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    dist[w] = 0.0;
    using It = std::pair<double, NodeId>;
    std::priority_queue<It, std::vector<It>, std::greater<It>> q;
    q.push({0.0, w});
    while (!q.empty()) {
      auto [dd, x] = q.top();
      q.pop();
      if (dd > dist[x] + 1e-12) continue;
      for (ArcId a : net.in_arcs(x)) {
        const Arc& arc = net.arc(a);
        if (dd + arc.igp_weight < dist[arc.from] - 1e-12) {
          dist[arc.from] = dd + arc.igp_weight;
          q.push({dist[arc.from], arc.from});
        }
      }
    }
    std::vector<NodeId> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return dist[a] > dist[b]; });
    // Inject every demand toward w at once and let it cascade.
    std::vector<double> in(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
      if (u != w) in[u] += tm.at(u, w);
    }
    for (NodeId x : order) {
      if (x == w || in[x] <= 0.0 ||
          dist[x] == std::numeric_limits<double>::infinity()) {
        continue;
      }
      std::vector<ArcId> dag;
      for (ArcId a : net.out_arcs(x)) {
        const Arc& arc = net.arc(a);
        if (std::abs(arc.igp_weight + dist[arc.to] - dist[x]) <= 1e-9) {
          dag.push_back(a);
        }
      }
      const double share = in[x] / dag.size();
      for (ArcId a : dag) {
        load[a] += share;
        in[net.arc(a).to] += share;
      }
    }
  }
  return load;
}

Network random_graph(std::mt19937& rng, int n, int extra_edges) {
  NetworkBuilder b;
  for (int i = 0; i < n; ++i) b.add_node("n" + std::to_string(i));
  std::uniform_int_distribution<int> wdist(1, 5);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    const double w = wdist(rng);
    b.add_link(pick(rng), i, {100.0}, w, w);
  }
  for (int e = 0; e < extra_edges; ++e) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int u = pick(rng);
    const int v = pick(rng);
    if (u == v) continue;
    const double w = wdist(rng);
    b.add_link(u, v, {100.0}, w, w);
  }
  return b.build();
}

}  // namespace

TEST_CASE("unique paths carry the whole unit") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u");
  const NodeId m = b.add_node("m");
  const NodeId w = b.add_node("w");
  const LinkId um = b.add_link(u, m, {10.0});
  const LinkId mw = b.add_link(m, w, {10.0});
  Network net = b.build();
  auto table = compute_flow_fractions(net);
  CHECK(table.fraction(u, w, net.link(um).forward) == doctest::Approx(1.0));
  CHECK(table.fraction(u, w, net.link(mw).forward) == doctest::Approx(1.0));
  CHECK(table.fraction(u, w, net.link(um).reverse) == doctest::Approx(0.0));
  // f_uu is identically zero
  for (const Arc& a : net.arcs()) {
    CHECK(table.fraction(u, u, a.id) == doctest::Approx(0.0));
  }
}

TEST_CASE("equal-cost square splits evenly over both paths") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u");
  const NodeId x = b.add_node("x");
  const NodeId y = b.add_node("y");
  const NodeId w = b.add_node("w");
  const LinkId ux = b.add_link(u, x, {10.0});
  const LinkId uy = b.add_link(u, y, {10.0});
  const LinkId xw = b.add_link(x, w, {10.0});
  const LinkId yw = b.add_link(y, w, {10.0});
  Network net = b.build();
  auto table = compute_flow_fractions(net, EcmpMode::even_split);
  for (LinkId l : {ux, uy, xw, yw}) {
    CHECK(table.fraction(u, w, net.link(l).forward) == doctest::Approx(0.5));
  }

  // Single-path mode resolves the tie toward the smallest node id.
  auto single = compute_flow_fractions(net, EcmpMode::single_path);
  CHECK(single.fraction(u, w, net.link(ux).forward) == doctest::Approx(1.0));
  CHECK(single.fraction(u, w, net.link(uy).forward) == doctest::Approx(0.0));
  CHECK(single.fraction(u, w, net.link(xw).forward) == doctest::Approx(1.0));
}

TEST_CASE("flow conservation holds on random graphs") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Network net = random_graph(rng, 8 + trial, 6);
    auto table = compute_flow_fractions(net);
    const int n = net.node_count();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId w = 0; w < n; ++w) {
        if (u == w || !table.reachable(u, w)) continue;
        std::vector<double> net_out(n, 0.0);
        for (const auto* e = table.begin(u, w); e != table.end(u, w); ++e) {
          CHECK(e->fraction > 0.0);
          CHECK(e->fraction <= 1.0 + 1e-9);
          const Arc& a = net.arc(e->arc);
          net_out[a.from] += e->fraction;
          net_out[a.to] -= e->fraction;
        }
        for (NodeId z = 0; z < n; ++z) {
          const double expect = z == u ? 1.0 : (z == w ? -1.0 : 0.0);
          CHECK(net_out[z] == doctest::Approx(expect).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("unreachable pairs report zero fractions") {
  NetworkBuilder b;
  b.add_node("a");
  b.add_node("b");
  b.add_node("c");
  b.add_link(0, 1, {10.0});
  Network net = b.build();
  auto table = compute_flow_fractions(net);
  CHECK(!table.reachable(0, 2));
  CHECK(table.begin(0, 2) == table.end(0, 2));
  CHECK(table.unreachable_pairs().size() == 4);  // (0,2),(1,2),(2,0),(2,1)
}

TEST_CASE("two-segment fraction is the sum of its halves") {
  auto ex = make_six_node_example();
  auto table = compute_flow_fractions(ex.net);

  SUBCASE("w = v degenerates to the plain shortest path") {
    for (const Arc& a : ex.net.arcs()) {
      CHECK(two_segment_fraction(table, ex.a, ex.f, ex.f, a.id) ==
            doctest::Approx(table.fraction(ex.a, ex.f, a.id)));
    }
  }

  SUBCASE("A to F via C uses exactly A-C, C-D, D-F") {
    std::vector<ArcId> expect = {ex.net.link(ex.ac).forward,
                                 ex.net.link(ex.cd).forward,
                                 ex.net.link(ex.df).forward};
    for (const Arc& a : ex.net.arcs()) {
      const double g = two_segment_fraction(table, ex.a, ex.f, ex.c, a.id);
      const bool on_path =
          std::find(expect.begin(), expect.end(), a.id) != expect.end();
      CHECK(g == doctest::Approx(on_path ? 1.0 : 0.0));
    }
  }

  SUBCASE("pointwise additivity on every pair") {
    for (const Arc& a : ex.net.arcs()) {
      for (NodeId w = 0; w < 6; ++w) {
        if (w == ex.b) continue;
        CHECK(two_segment_fraction(table, ex.b, ex.f, w, a.id) ==
              doctest::Approx(table.fraction(ex.b, w, a.id) +
                              table.fraction(w, ex.f, a.id)));
      }
    }
  }

  CHECK_THROWS_AS(two_segment_fraction(table, ex.a, ex.a, ex.c, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(two_segment_fraction(table, ex.a, ex.f, ex.a, 0),
                  std::invalid_argument);
}

TEST_CASE("overlapping halves can push an arc fraction above 1") {
  // Ring with asymmetric weights: the shortest s->t path and the shortest
  // t->m2 path both traverse m1->m2, so a demand (s, m2) steered via t
  // loops back and crosses that arc twice.
  NetworkBuilder b;
  const NodeId s = b.add_node("s");
  const NodeId m1 = b.add_node("m1");
  const NodeId m2 = b.add_node("m2");
  const NodeId t = b.add_node("t");
  b.add_link(s, m1, {10.0}, 1.0, 1.0);
  const LinkId mid = b.add_link(m1, m2, {10.0}, 1.0, 1.0);
  b.add_link(m2, t, {10.0}, 1.0, 10.0);
  b.add_link(t, s, {10.0}, 1.0, 10.0);
  Network net = b.build();
  auto table = compute_flow_fractions(net);

  const ArcId shared = net.link(mid).forward;
  CHECK(table.fraction(s, t, shared) == doctest::Approx(1.0));   // s,m1,m2,t
  CHECK(table.fraction(t, m2, shared) == doctest::Approx(1.0));  // t,s,m1,m2
  CHECK(two_segment_fraction(table, s, m2, t, shared) ==
        doctest::Approx(2.0));
}

TEST_CASE("arc traffic reproduces the six-node shortest-path loads") {
  auto ex = make_six_node_example();
  auto table = compute_flow_fractions(ex.net);
  const auto loads = arc_traffic(table, ex.demands, spr_splits(ex.demands));
  auto fwd = [&](LinkId l) { return loads[ex.net.link(l).forward]; };
  CHECK(fwd(ex.ab) == doctest::Approx(0.3));
  CHECK(fwd(ex.ac) == doctest::Approx(0.3));
  CHECK(fwd(ex.be) == doctest::Approx(0.6));
  CHECK(fwd(ex.bc) == doctest::Approx(0.1));
  CHECK(fwd(ex.cd) == doctest::Approx(0.1));
  CHECK(fwd(ex.de) == doctest::Approx(0.7));
  CHECK(fwd(ex.df) == doctest::Approx(0.1));
  CHECK(fwd(ex.ef) == doctest::Approx(0.6));
}

TEST_CASE("steering both F-bound demands through C empties three links") {
  auto ex = make_six_node_example();
  auto table = compute_flow_fractions(ex.net);
  SplitPlan splits = spr_splits(ex.demands);
  for (auto& s : splits) {
    if (s.dst == ex.f && (s.src == ex.a || s.src == ex.b)) {
      s.via = {{ex.c, 1.0}};
    }
  }
  const auto loads = arc_traffic(table, ex.demands, splits);
  auto fwd = [&](LinkId l) { return loads[ex.net.link(l).forward]; };
  CHECK(fwd(ex.ab) == doctest::Approx(0.0));
  CHECK(fwd(ex.be) == doctest::Approx(0.0));
  CHECK(fwd(ex.ef) == doctest::Approx(0.0));
  CHECK(fwd(ex.ac) == doctest::Approx(0.6));
  CHECK(fwd(ex.bc) == doctest::Approx(0.4));
  CHECK(fwd(ex.cd) == doctest::Approx(0.7));
  CHECK(fwd(ex.df) == doctest::Approx(0.7));
  CHECK(fwd(ex.de) == doctest::Approx(0.7));
}

TEST_CASE("arc traffic validates split rows") {
  auto ex = make_six_node_example();
  auto table = compute_flow_fractions(ex.net);
  SplitPlan splits = spr_splits(ex.demands);
  splits[0].via = {{splits[0].dst, 0.5}};  // sums to 0.5
  CHECK_THROWS_AS(arc_traffic(table, ex.demands, splits),
                  std::invalid_argument);
  splits.erase(splits.begin());
  CHECK_THROWS_AS(arc_traffic(table, ex.demands, splits),
                  std::invalid_argument);
  const auto zero = arc_traffic(table, TrafficMatrix(6), {});
  for (double v : zero) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("spr splits match the independent per-destination oracle") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    Network net = random_graph(rng, 10, 8);
    TrafficMatrix tm(net.node_count());
    std::uniform_real_distribution<double> vol(0.0, 20.0);
    for (NodeId u = 0; u < net.node_count(); ++u) {
      for (NodeId v = 0; v < net.node_count(); ++v) {
        if (u != v && (rng() & 3) == 0) tm.set(u, v, vol(rng));
      }
    }
    auto table = compute_flow_fractions(net);
    const auto got = arc_traffic(table, tm, spr_splits(tm));
    const auto want = spr_loads_oracle(net, tm);
    for (size_t a = 0; a < got.size(); ++a) {
      CHECK(got[a] == doctest::Approx(want[a]).epsilon(1e-9));
    }
  }
}

TEST_CASE("scaling demands scales loads linearly under fixed routing") {
  std::mt19937 rng(3);
  Network net = random_graph(rng, 9, 6);
  TrafficMatrix tm(net.node_count());
  for (NodeId u = 0; u < net.node_count(); ++u) {
    for (NodeId v = 0; v < net.node_count(); ++v) {
      if (u != v && (rng() & 1)) tm.set(u, v, (rng() % 50) + 1.0);
    }
  }
  auto table = compute_flow_fractions(net);
  const auto base = arc_traffic(table, tm, spr_splits(tm));
  const double lambda = 0.37;
  const TrafficMatrix scaled = scale_matrix(tm, lambda);
  const auto after = arc_traffic(table, scaled, spr_splits(scaled));
  for (size_t a = 0; a < base.size(); ++a) {
    CHECK(after[a] == doctest::Approx(lambda * base[a]).epsilon(1e-9));
  }
}
