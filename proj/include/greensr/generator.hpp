#pragma once

#include <string>
#include <utility>
#include <vector>

#include "greensr/network.hpp"
#include "greensr/repetita.hpp"
#include "greensr/traffic.hpp"

namespace greensr {

// Synthetic stand-ins for evaluation data. The topology generator grows a
// degree-skewed (hub-heavy) connected graph and pairs it with a gravity
// demand matrix scaled so shortest-path routing at full capacity hits the
// requested MLU. Not measured data; labeled by its seed.

struct TopologySpec {
  std::string name = "synthetic";
  int nodes = 20;
  int edges = 40;  // undirected links; at least nodes - 1
  unsigned seed = 1;
  double bandwidth = 40000.0;
  double spr_mlu = 0.9;  // demand scale calibration point
};

struct GeneratedInstance {
  RepetitaGraph graph;
  std::vector<RepetitaDemand> demands;
};

GeneratedInstance generate_topology_instance(const TopologySpec& spec);

/// Daily sinusoid plus Gaussian noise on a quarter-hour-style grid:
/// base * (1 + amplitude * sin(2 pi t / slots + phase)) + N(0, noise).
TrafficTimeSeries generate_traffic_series(int slots_per_day, int days,
                                          double base, double amplitude,
                                          double noise_sigma, double phase,
                                          unsigned seed);

struct RandomInstanceSpec {
  int nodes = 10;
  unsigned seed = 1;
  double spr_mlu = 0.5;     // shortest-path MLU after scaling
  int min_ports = 2;
  int max_ports = 4;
  double demand_density = 0.33;  // probability per ordered pair
};

/// Small random instance for property suites: spanning tree plus extra
/// links, mixed port counts, demands scaled to the requested MLU.
std::pair<Network, TrafficMatrix> generate_random_instance(
    const RandomInstanceSpec& spec);

}  // namespace greensr
