#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace greensr {

using NodeId = int;
using ArcId = int;
using LinkId = int;
using PortId = int;
using CardId = int;

enum class PortRole { backbone, access };

/// Physical link endpoint. A port serves both directed arcs of its link and
/// is the unit of deactivation; access ports are never eligible.
struct Port {
  PortId id = -1;
  LinkId link = -1;
  double capacity = 0.0;  // c_p, same units as demand volumes
  PortRole role = PortRole::backbone;
  CardId card_at_u = -1;  // linecard hosting the endpoint at link.u
  CardId card_at_v = -1;  // linecard hosting the endpoint at link.v
};

struct Linecard {
  CardId id = -1;
  NodeId router = -1;
  int slots = 8;  // port-endpoint capacity
  double card_energy = 1.0;
  double port_energy = 0.0;
};

struct Arc {
  ArcId id = -1;
  NodeId from = -1;
  NodeId to = -1;
  LinkId link = -1;
  double igp_weight = 1.0;
};

/// One physical connection: a pair of opposite arcs sharing a port set.
struct Link {
  LinkId id = -1;
  NodeId u = -1;
  NodeId v = -1;
  ArcId forward = -1;  // u -> v
  ArcId reverse = -1;  // v -> u
  std::vector<PortId> ports;
};

class ActivationPlan;

class Network {
 public:
  int node_count() const { return static_cast<int>(node_names_.size()); }
  const std::string& node_name(NodeId n) const { return node_names_.at(n); }
  NodeId node_by_name(const std::string& name) const;  // -1 if unknown

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Port>& ports() const { return ports_; }
  const std::vector<Linecard>& linecards() const { return cards_; }
  const Arc& arc(ArcId a) const;
  const Link& link(LinkId l) const { return links_.at(l); }
  const Port& port(PortId p) const { return ports_.at(p); }

  const std::vector<ArcId>& out_arcs(NodeId n) const { return out_arcs_.at(n); }
  const std::vector<ArcId>& in_arcs(NodeId n) const { return in_arcs_.at(n); }

  /// c(a): summed capacity of the link's ports, all of them or only the
  /// ones a plan keeps active. Identical for both directions of a link.
  double arc_capacity(ArcId a) const;
  double arc_capacity(ArcId a, const ActivationPlan& plan) const;

  /// Port endpoints hosted at a router (each port contributes one endpoint
  /// at each of its two sides).
  int endpoint_count(NodeId router) const;

  int backbone_port_count() const;

 private:
  friend class NetworkBuilder;
  std::vector<std::string> node_names_;
  std::vector<Arc> arcs_;
  std::vector<Link> links_;
  std::vector<Port> ports_;
  std::vector<Linecard> cards_;
  std::vector<std::vector<ArcId>> out_arcs_;
  std::vector<std::vector<ArcId>> in_arcs_;
};

/// On/off states for every port and linecard. One state per port, shared by
/// both arc directions. An optional endpoint-to-linecard remap (produced by
/// linecard packing, which may reassign endpoints once) overrides the
/// network's native mapping.
class ActivationPlan {
 public:
  ActivationPlan() = default;
  static ActivationPlan all_active(const Network& net);

  std::vector<std::uint8_t> port_active;
  std::vector<std::uint8_t> card_active;
  std::vector<CardId> remap_card_at_u;  // by PortId; empty = native mapping
  std::vector<CardId> remap_card_at_v;

  bool is_port_active(PortId p) const { return port_active.at(p) != 0; }
  bool is_card_active(CardId c) const { return card_active.at(c) != 0; }
  CardId card_of_u_side(const Network& net, PortId p) const;
  CardId card_of_v_side(const Network& net, PortId p) const;

  int inactive_port_count() const;
  int inactive_card_count() const;
};

struct PlanViolation {
  std::string rule;  // "port-on-inactive-card" | "access-always-on" | ...
  std::string detail;
};

/// Empty result iff the plan satisfies every activation invariant:
/// no active port on an inactive linecard, access ports active, remap
/// (when present) stays on the right router and within slot capacity.
std::vector<PlanViolation> validate_plan(const Network& net,
                                         const ActivationPlan& plan);

class NetworkBuilder {
 public:
  NodeId add_node(const std::string& name);
  NodeId node(const std::string& name);  // add-or-get

  /// Adds one physical link carrying the given ports. Weights are per
  /// direction (IGP metrics); capacities must be strictly positive.
  LinkId add_link(NodeId u, NodeId v, const std::vector<double>& port_caps,
                  double weight_uv = 1.0, double weight_vu = 1.0,
                  PortRole role = PortRole::backbone);

  /// Finalizes the network; linecards are allocated per router, one per
  /// `slots_per_card` endpoints (ceiling), endpoints assigned in port order.
  Network build(int slots_per_card = 8, double card_energy = 1.0,
                double port_energy = 0.0) const;

 private:
  struct PendingLink {
    NodeId u, v;
    std::vector<double> caps;
    double w_uv, w_vu;
    PortRole role;
  };
  std::vector<std::string> names_;
  std::vector<PendingLink> pending_;
};

}  // namespace greensr
