#include "greensr/repetita.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace greensr {

namespace {

[[noreturn]] void fail(int lineno, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(lineno) + ": " + what);
}

struct LineReader {
  std::istream& in;
  int lineno = 0;
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  }
};

int parse_count(const std::string& line, int lineno, const char* section) {
  std::istringstream ls(line);
  std::string head;
  int count = -1;
  ls >> head >> count;
  if (head != section || count < 0) {
    fail(lineno, std::string("expected '") + section + " <count>'");
  }
  return count;
}

void expect_header(LineReader& r, const char* what) {
  std::string line;
  if (!r.next(line)) fail(r.lineno, std::string("missing header: ") + what);
  std::istringstream ls(line);
  std::string first;
  ls >> first;
  if (first != "label") {
    fail(r.lineno, std::string("expected column header '") + what + "'");
  }
}

}  // namespace

RepetitaGraph parse_graph(std::istream& in) {
  LineReader r{in};
  RepetitaGraph g;
  std::string line;
  if (!r.next(line)) fail(r.lineno, "empty graph file");
  const int nodes = parse_count(line, r.lineno, "NODES");
  expect_header(r, "label x y");
  for (int i = 0; i < nodes; ++i) {
    if (!r.next(line)) fail(r.lineno, "unexpected end of NODES section");
    std::istringstream ls(line);
    RepetitaNode n;
    if (!(ls >> n.label >> n.x >> n.y)) fail(r.lineno, "malformed node row");
    g.nodes.push_back(std::move(n));
  }
  if (!r.next(line)) fail(r.lineno, "missing EDGES section");
  const int edges = parse_count(line, r.lineno, "EDGES");
  expect_header(r, "label src dest weight bw delay");
  for (int i = 0; i < edges; ++i) {
    if (!r.next(line)) fail(r.lineno, "unexpected end of EDGES section");
    std::istringstream ls(line);
    RepetitaEdge e;
    if (!(ls >> e.label >> e.src >> e.dest >> e.weight >> e.bandwidth >>
          e.delay)) {
      fail(r.lineno, "malformed edge row");
    }
    if (e.src < 0 || e.src >= nodes || e.dest < 0 || e.dest >= nodes) {
      fail(r.lineno, "edge references unknown node");
    }
    if (e.src == e.dest) fail(r.lineno, "self-loop edge");
    if (!(e.bandwidth > 0.0)) fail(r.lineno, "zero-bandwidth edge");
    if (!(e.weight > 0.0)) fail(r.lineno, "non-positive IGP weight");
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::vector<RepetitaDemand> parse_demands(std::istream& in, int node_count) {
  LineReader r{in};
  std::string line;
  if (!r.next(line)) fail(r.lineno, "empty demands file");
  const int count = parse_count(line, r.lineno, "DEMANDS");
  expect_header(r, "label src dest bw");
  std::vector<RepetitaDemand> out;
  for (int i = 0; i < count; ++i) {
    if (!r.next(line)) fail(r.lineno, "unexpected end of DEMANDS section");
    std::istringstream ls(line);
    RepetitaDemand d;
    if (!(ls >> d.label >> d.src >> d.dest >> d.volume)) {
      fail(r.lineno, "malformed demand row");
    }
    if (d.src < 0 || d.src >= node_count || d.dest < 0 ||
        d.dest >= node_count) {
      fail(r.lineno, "demand references unknown node");
    }
    if (d.src == d.dest) fail(r.lineno, "self-demand rejected");
    if (d.volume < 0.0) fail(r.lineno, "negative demand volume");
    out.push_back(std::move(d));
  }
  return out;
}

void write_graph(std::ostream& out, const RepetitaGraph& g) {
  std::ostringstream num;
  num.precision(12);
  const auto fmt = [&num](double v) {
    num.str("");
    num << v;
    return num.str();
  };
  out << "NODES " << g.nodes.size() << "\nlabel x y\n";
  for (const RepetitaNode& n : g.nodes) {
    out << n.label << ' ' << fmt(n.x) << ' ' << fmt(n.y) << '\n';
  }
  out << "\nEDGES " << g.edges.size() << "\nlabel src dest weight bw delay\n";
  for (const RepetitaEdge& e : g.edges) {
    out << e.label << ' ' << e.src << ' ' << e.dest << ' ' << fmt(e.weight)
        << ' ' << fmt(e.bandwidth) << ' ' << fmt(e.delay) << '\n';
  }
}

void write_demands(std::ostream& out, const std::vector<RepetitaDemand>& d) {
  std::ostringstream num;
  num.precision(12);
  out << "DEMANDS " << d.size() << "\nlabel src dest bw\n";
  for (const RepetitaDemand& dem : d) {
    num.str("");
    num << dem.volume;
    out << dem.label << ' ' << dem.src << ' ' << dem.dest << ' ' << num.str()
        << '\n';
  }
}

std::pair<Network, TrafficMatrix> build_network(
    const RepetitaGraph& g, const std::vector<RepetitaDemand>& demands,
    int ports_per_linecard, bool accept_asymmetric_bandwidth) {
  NetworkBuilder builder;
  for (const RepetitaNode& n : g.nodes) builder.add_node(n.label);

  // Pair opposite-direction entries into one physical link, in file order.
  std::map<std::pair<int, int>, std::vector<size_t>> unpaired;
  struct PendingLink {
    int u, v;
    double w_uv, w_vu, bandwidth;
  };
  std::vector<PendingLink> links;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const RepetitaEdge& e = g.edges[i];
    auto& reverse_queue = unpaired[{e.dest, e.src}];
    if (!reverse_queue.empty()) {
      const RepetitaEdge& other = g.edges[reverse_queue.front()];
      reverse_queue.erase(reverse_queue.begin());
      double bw = other.bandwidth;
      if (std::abs(other.bandwidth - e.bandwidth) > 1e-9 * other.bandwidth) {
        if (!accept_asymmetric_bandwidth) {
          throw std::runtime_error(
              "edges " + other.label + " and " + e.label +
              " pair with different bandwidths; pass the override to keep "
              "the larger");
        }
        bw = std::max(other.bandwidth, e.bandwidth);
      }
      links.push_back({other.src, other.dest, other.weight, e.weight, bw});
    } else {
      unpaired[{e.src, e.dest}].push_back(i);
    }
  }
  for (const auto& [key, queue] : unpaired) {
    for (size_t idx : queue) {
      const RepetitaEdge& e = g.edges[idx];
      links.push_back({e.src, e.dest, e.weight, e.weight, e.bandwidth});
    }
  }
  for (const PendingLink& l : links) {
    builder.add_link(l.u, l.v, {l.bandwidth}, l.w_uv, l.w_vu);
  }
  Network net = builder.build(ports_per_linecard);

  TrafficMatrix tm(static_cast<int>(g.nodes.size()));
  for (const RepetitaDemand& d : demands) tm.add(d.src, d.dest, d.volume);
  return {std::move(net), std::move(tm)};
}

std::pair<Network, TrafficMatrix> parse_repetita(
    const std::string& graph_path, const std::string& demands_path,
    int ports_per_linecard, bool accept_asymmetric_bandwidth) {
  std::ifstream gf(graph_path);
  if (!gf) throw std::runtime_error("cannot open graph file " + graph_path);
  RepetitaGraph g;
  try {
    g = parse_graph(gf);
  } catch (const std::exception& e) {
    throw std::runtime_error(graph_path + ": " + e.what());
  }
  std::ifstream df(demands_path);
  if (!df) {
    throw std::runtime_error("cannot open demands file " + demands_path);
  }
  std::vector<RepetitaDemand> demands;
  try {
    demands = parse_demands(df, static_cast<int>(g.nodes.size()));
  } catch (const std::exception& e) {
    throw std::runtime_error(demands_path + ": " + e.what());
  }
  return build_network(g, demands, ports_per_linecard,
                       accept_asymmetric_bandwidth);
}

Network expand_ports(const Network& net, int ports_per_link,
                     double port_capacity, int ports_per_linecard) {
  if (ports_per_link <= 0) {
    throw std::invalid_argument("ports_per_link must be positive");
  }
  NetworkBuilder builder;
  for (NodeId n = 0; n < net.node_count(); ++n) {
    builder.add_node(net.node_name(n));
  }
  for (const Link& l : net.links()) {
    double total = 0.0;
    PortRole role = PortRole::backbone;
    for (PortId p : l.ports) {
      total += net.port(p).capacity;
      role = net.port(p).role;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("zero-bandwidth link cannot be split");
    }
    const double per_port =
        port_capacity > 0.0 ? port_capacity : total / ports_per_link;
    builder.add_link(l.u, l.v, std::vector<double>(ports_per_link, per_port),
                     net.arc(l.forward).igp_weight,
                     net.arc(l.reverse).igp_weight, role);
  }
  return builder.build(ports_per_linecard);
}

}  // namespace greensr
