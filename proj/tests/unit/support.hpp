#pragma once

#include "greensr/flow_fractions.hpp"
#include "greensr/network.hpp"
#include "greensr/traffic.hpp"

namespace greensr::testsupport {

// Six-node example: two flows toward F can be consolidated through C so the
// A-B, B-E and E-F links fall empty. One port of capacity 1 per link.
struct SixNodeExample {
  Network net;
  TrafficMatrix demands;
  NodeId a, b, c, d, e, f;
  LinkId ab, ac, bc, be, cd, de, df, ef;
};

inline SixNodeExample make_six_node_example() {
  NetworkBuilder builder;
  SixNodeExample ex;
  ex.a = builder.add_node("A");
  ex.b = builder.add_node("B");
  ex.c = builder.add_node("C");
  ex.d = builder.add_node("D");
  ex.e = builder.add_node("E");
  ex.f = builder.add_node("F");
  ex.ab = builder.add_link(ex.a, ex.b, {1.0}, 1.0, 1.0);
  ex.ac = builder.add_link(ex.a, ex.c, {1.0}, 2.0, 2.0);
  ex.bc = builder.add_link(ex.b, ex.c, {1.0}, 2.0, 2.0);
  ex.be = builder.add_link(ex.b, ex.e, {1.0}, 1.0, 1.0);
  ex.cd = builder.add_link(ex.c, ex.d, {1.0}, 1.0, 1.0);
  ex.de = builder.add_link(ex.d, ex.e, {1.0}, 1.0, 1.0);
  ex.df = builder.add_link(ex.d, ex.f, {1.0}, 1.0, 1.0);
  ex.ef = builder.add_link(ex.e, ex.f, {1.0}, 1.0, 1.0);
  ex.net = builder.build();
  ex.demands = TrafficMatrix(6);
  ex.demands.set(ex.a, ex.f, 0.3);
  ex.demands.set(ex.b, ex.f, 0.3);
  ex.demands.set(ex.a, ex.c, 0.3);
  ex.demands.set(ex.b, ex.c, 0.1);
  ex.demands.set(ex.c, ex.f, 0.1);
  ex.demands.set(ex.d, ex.e, 0.7);
  return ex;
}

inline ArcId forward_arc(const Network& net, LinkId l) {
  return net.link(l).forward;
}

}  // namespace greensr::testsupport
