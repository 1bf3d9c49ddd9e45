#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "greensr/network.hpp"
#include "greensr/traffic.hpp"

namespace greensr {

// Text formats: a graph file with NODES (label x y) and EDGES
// (label src dest weight bw delay) sections, and a demands file with a
// DEMANDS (label src dest bw) section. Node references are indices into
// the NODES section.

struct RepetitaNode {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct RepetitaEdge {
  std::string label;
  int src = -1;
  int dest = -1;
  double weight = 1.0;
  double bandwidth = 0.0;
  double delay = 0.0;
};

struct RepetitaGraph {
  std::vector<RepetitaNode> nodes;
  std::vector<RepetitaEdge> edges;
};

struct RepetitaDemand {
  std::string label;
  int src = -1;
  int dest = -1;
  double volume = 0.0;
};

RepetitaGraph parse_graph(std::istream& in);
std::vector<RepetitaDemand> parse_demands(std::istream& in, int node_count);
void write_graph(std::ostream& out, const RepetitaGraph& g);
void write_demands(std::ostream& out, const std::vector<RepetitaDemand>& d);

/// Builds the one-port-per-link network (port capacity = link bandwidth)
/// and the demand matrix. Edge entries listed in both directions pair into
/// one physical link; a lone entry becomes an undirected link with the same
/// weight both ways. Asymmetric paired bandwidths are an error unless
/// accept_asymmetric_bandwidth keeps the larger one.
std::pair<Network, TrafficMatrix> build_network(
    const RepetitaGraph& g, const std::vector<RepetitaDemand>& demands,
    int ports_per_linecard = 8, bool accept_asymmetric_bandwidth = false);

std::pair<Network, TrafficMatrix> parse_repetita(
    const std::string& graph_path, const std::string& demands_path,
    int ports_per_linecard = 8, bool accept_asymmetric_bandwidth = false);

/// Splits every link into ports_per_link ports. Per-port capacity defaults
/// to the link bandwidth divided by ports_per_link, keeping the total;
/// a positive port_capacity overrides it. Linecards are reallocated, one
/// per ports_per_linecard endpoints.
Network expand_ports(const Network& net, int ports_per_link,
                     double port_capacity = 0.0, int ports_per_linecard = 8);

}  // namespace greensr
