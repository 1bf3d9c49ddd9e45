#include "greensr/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "greensr/flow_fractions.hpp"

namespace greensr {

namespace {

double spr_mlu_of(const Network& net, const TrafficMatrix& tm) {
  const auto table = compute_flow_fractions(net);
  const auto loads = arc_traffic(table, tm, spr_splits(tm));
  double mlu = 0.0;
  for (const Arc& a : net.arcs()) {
    mlu = std::max(mlu, loads[a.id] / net.arc_capacity(a.id));
  }
  return mlu;
}

}  // namespace

GeneratedInstance generate_topology_instance(const TopologySpec& spec) {
  if (spec.nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  if (spec.edges < spec.nodes - 1) {
    throw std::invalid_argument("need at least nodes-1 edges");
  }
  std::mt19937 rng(spec.seed);
  GeneratedInstance out;
  for (int i = 0; i < spec.nodes; ++i) {
    out.graph.nodes.push_back({spec.name + "_" + std::to_string(i),
                               static_cast<double>(i % 10),
                               static_cast<double>(i / 10)});
  }

  // Preferential attachment gives the hub-and-spoke degree skew of real
  // backbone topologies.
  std::vector<int> degree(spec.nodes, 0);
  std::set<std::pair<int, int>> seen;
  std::uniform_int_distribution<int> weight_dist(1, 10);
  const auto add_edge = [&](int u, int v) {
    out.graph.edges.push_back({"edge_" + std::to_string(out.graph.edges.size()),
                               u, v, static_cast<double>(weight_dist(rng)),
                               spec.bandwidth, 1.0});
    ++degree[u];
    ++degree[v];
    seen.insert({std::min(u, v), std::max(u, v)});
  };
  const auto pick_preferential = [&](int below) {
    long total = 0;
    for (int i = 0; i < below; ++i) total += degree[i] + 1;
    std::uniform_int_distribution<long> dist(0, total - 1);
    long roll = dist(rng);
    for (int i = 0; i < below; ++i) {
      roll -= degree[i] + 1;
      if (roll < 0) return i;
    }
    return below - 1;
  };
  for (int i = 1; i < spec.nodes; ++i) add_edge(pick_preferential(i), i);
  int guard = 0;
  while (static_cast<int>(out.graph.edges.size()) < spec.edges &&
         guard++ < spec.edges * 200) {
    const int u = pick_preferential(spec.nodes);
    std::uniform_int_distribution<int> any(0, spec.nodes - 1);
    const int v = any(rng);
    if (u == v || seen.count({std::min(u, v), std::max(u, v)})) continue;
    add_edge(u, v);
  }

  // Gravity demands: skewed node masses, every ordered pair.
  std::lognormal_distribution<double> mass_dist(0.0, 1.0);
  std::vector<double> mass(spec.nodes);
  for (int i = 0; i < spec.nodes; ++i) {
    mass[i] = mass_dist(rng) * (degree[i] + 1);
  }
  for (int u = 0; u < spec.nodes; ++u) {
    for (int v = 0; v < spec.nodes; ++v) {
      if (u == v) continue;
      out.demands.push_back({"demand_" + std::to_string(out.demands.size()),
                             u, v, mass[u] * mass[v]});
    }
  }

  // Calibrate total volume so shortest-path routing hits the target MLU.
  TrafficMatrix tm(spec.nodes);
  for (const RepetitaDemand& d : out.demands) tm.add(d.src, d.dest, d.volume);
  NetworkBuilder probe;
  for (const RepetitaNode& n : out.graph.nodes) probe.add_node(n.label);
  for (const RepetitaEdge& e : out.graph.edges) {
    probe.add_link(e.src, e.dest, {e.bandwidth}, e.weight, e.weight);
  }
  const double mlu = spr_mlu_of(probe.build(), tm);
  const double scale = spec.spr_mlu / mlu;
  for (RepetitaDemand& d : out.demands) d.volume *= scale;
  return out;
}

TrafficTimeSeries generate_traffic_series(int slots_per_day, int days,
                                          double base, double amplitude,
                                          double noise_sigma, double phase,
                                          unsigned seed) {
  if (slots_per_day <= 0 || days <= 0) {
    throw std::invalid_argument("series needs positive dimensions");
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  TrafficTimeSeries series(slots_per_day, days);
  for (int d = 0; d < days; ++d) {
    for (int t = 0; t < slots_per_day; ++t) {
      const double diurnal =
          base * (1.0 + amplitude *
                            std::sin(2.0 * M_PI * t / slots_per_day + phase));
      const double sample =
          std::max(0.0, diurnal + (noise_sigma > 0.0 ? noise(rng) : 0.0));
      series.set(d, t, sample);
    }
  }
  return series;
}

std::pair<Network, TrafficMatrix> generate_random_instance(
    const RandomInstanceSpec& spec) {
  if (spec.nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  std::mt19937 rng(spec.seed);
  NetworkBuilder b;
  for (int i = 0; i < spec.nodes; ++i) {
    b.add_node("n" + std::to_string(i));
  }
  std::uniform_int_distribution<int> weight_dist(1, 4);
  std::uniform_int_distribution<int> ports_dist(spec.min_ports,
                                                spec.max_ports);
  std::uniform_real_distribution<double> cap_dist(20.0, 40.0);
  for (int i = 1; i < spec.nodes; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    const double w = weight_dist(rng);
    b.add_link(pick(rng), i,
               std::vector<double>(ports_dist(rng), cap_dist(rng)), w, w);
  }
  for (int e = 0; e < spec.nodes; ++e) {
    std::uniform_int_distribution<int> any(0, spec.nodes - 1);
    const int u = any(rng);
    const int v = any(rng);
    if (u == v) continue;
    const double w = weight_dist(rng);
    b.add_link(u, v, std::vector<double>(ports_dist(rng), cap_dist(rng)), w,
               w);
  }
  Network net = b.build();

  TrafficMatrix tm(spec.nodes);
  std::uniform_real_distribution<double> volume(1.0, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (NodeId u = 0; u < spec.nodes; ++u) {
    for (NodeId v = 0; v < spec.nodes; ++v) {
      if (u != v && coin(rng) < spec.demand_density) {
        tm.set(u, v, volume(rng));
      }
    }
  }
  if (tm.nonzero().empty()) tm.set(0, spec.nodes - 1, 5.0);
  const double mlu = spr_mlu_of(net, tm);
  return {std::move(net), scale_matrix(tm, spec.spr_mlu / mlu)};
}

}  // namespace greensr
