#include "greensr/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace greensr {

NodeId Network::node_by_name(const std::string& name) const {
  for (NodeId n = 0; n < node_count(); ++n) {
    if (node_names_[n] == name) return n;
  }
  return -1;
}

const Arc& Network::arc(ArcId a) const {
  if (a < 0 || a >= static_cast<ArcId>(arcs_.size())) {
    throw std::out_of_range("unknown arc id " + std::to_string(a));
  }
  return arcs_[a];
}

double Network::arc_capacity(ArcId a) const {
  const Link& l = links_.at(arc(a).link);
  double total = 0.0;
  for (PortId p : l.ports) total += ports_[p].capacity;
  return total;
}

double Network::arc_capacity(ArcId a, const ActivationPlan& plan) const {
  const Link& l = links_.at(arc(a).link);
  double total = 0.0;
  for (PortId p : l.ports) {
    if (plan.is_port_active(p)) total += ports_[p].capacity;
  }
  return total;
}

int Network::endpoint_count(NodeId router) const {
  int n = 0;
  for (const Link& l : links_) {
    if (l.u == router) n += static_cast<int>(l.ports.size());
    if (l.v == router) n += static_cast<int>(l.ports.size());
  }
  return n;
}

int Network::backbone_port_count() const {
  int n = 0;
  for (const Port& p : ports_) {
    if (p.role == PortRole::backbone) ++n;
  }
  return n;
}

ActivationPlan ActivationPlan::all_active(const Network& net) {
  ActivationPlan plan;
  plan.port_active.assign(net.ports().size(), 1);
  plan.card_active.assign(net.linecards().size(), 1);
  return plan;
}

CardId ActivationPlan::card_of_u_side(const Network& net, PortId p) const {
  if (!remap_card_at_u.empty()) return remap_card_at_u.at(p);
  return net.port(p).card_at_u;
}

CardId ActivationPlan::card_of_v_side(const Network& net, PortId p) const {
  if (!remap_card_at_v.empty()) return remap_card_at_v.at(p);
  return net.port(p).card_at_v;
}

int ActivationPlan::inactive_port_count() const {
  return static_cast<int>(
      std::count(port_active.begin(), port_active.end(), 0));
}

int ActivationPlan::inactive_card_count() const {
  return static_cast<int>(
      std::count(card_active.begin(), card_active.end(), 0));
}

std::vector<PlanViolation> validate_plan(const Network& net,
                                         const ActivationPlan& plan) {
  if (plan.port_active.size() != net.ports().size() ||
      plan.card_active.size() != net.linecards().size()) {
    throw std::invalid_argument(
        "activation plan does not cover this network's ports/linecards");
  }
  if (!plan.remap_card_at_u.empty() &&
      (plan.remap_card_at_u.size() != net.ports().size() ||
       plan.remap_card_at_v.size() != net.ports().size())) {
    throw std::invalid_argument("plan remap does not cover all ports");
  }

  std::vector<PlanViolation> out;
  for (const Port& p : net.ports()) {
    if (p.role == PortRole::access && !plan.is_port_active(p.id)) {
      out.push_back({"access-always-on",
                     "access port " + std::to_string(p.id) + " is inactive"});
    }
    if (!plan.is_port_active(p.id)) continue;
    const CardId cu = plan.card_of_u_side(net, p.id);
    const CardId cv = plan.card_of_v_side(net, p.id);
    for (CardId c : {cu, cv}) {
      if (c < 0 || c >= static_cast<CardId>(net.linecards().size())) {
        out.push_back({"unknown-linecard",
                       "port " + std::to_string(p.id) +
                           " mapped to unknown linecard " + std::to_string(c)});
      } else if (!plan.is_card_active(c)) {
        out.push_back({"port-on-inactive-card",
                       "active port " + std::to_string(p.id) +
                           " resides on inactive linecard " +
                           std::to_string(c)});
      }
    }
  }

  // Remapped assignments must stay on the port's endpoint routers and
  // within each card's slot capacity.
  std::vector<int> assigned(net.linecards().size(), 0);
  for (const Port& p : net.ports()) {
    const Link& l = net.link(p.link);
    const CardId cu = plan.card_of_u_side(net, p.id);
    const CardId cv = plan.card_of_v_side(net, p.id);
    if (cu >= 0 && cu < static_cast<CardId>(net.linecards().size())) {
      if (net.linecards()[cu].router != l.u) {
        out.push_back({"card-wrong-router",
                       "port " + std::to_string(p.id) +
                           " u-endpoint assigned off-router"});
      }
      ++assigned[cu];
    }
    if (cv >= 0 && cv < static_cast<CardId>(net.linecards().size())) {
      if (net.linecards()[cv].router != l.v) {
        out.push_back({"card-wrong-router",
                       "port " + std::to_string(p.id) +
                           " v-endpoint assigned off-router"});
      }
      ++assigned[cv];
    }
  }
  for (const Linecard& c : net.linecards()) {
    if (assigned[c.id] > c.slots) {
      out.push_back({"slot-capacity",
                     "linecard " + std::to_string(c.id) + " holds " +
                         std::to_string(assigned[c.id]) + " endpoints, slots " +
                         std::to_string(c.slots)});
    }
  }
  return out;
}

NodeId NetworkBuilder::add_node(const std::string& name) {
  for (const std::string& existing : names_) {
    if (existing == name) {
      throw std::invalid_argument("duplicate node name: " + name);
    }
  }
  names_.push_back(name);
  return static_cast<NodeId>(names_.size()) - 1;
}

NodeId NetworkBuilder::node(const std::string& name) {
  for (NodeId n = 0; n < static_cast<NodeId>(names_.size()); ++n) {
    if (names_[n] == name) return n;
  }
  names_.push_back(name);
  return static_cast<NodeId>(names_.size()) - 1;
}

LinkId NetworkBuilder::add_link(NodeId u, NodeId v,
                                const std::vector<double>& port_caps,
                                double weight_uv, double weight_vu,
                                PortRole role) {
  if (u == v) throw std::invalid_argument("self-loop link");
  if (u < 0 || v < 0 || u >= static_cast<NodeId>(names_.size()) ||
      v >= static_cast<NodeId>(names_.size())) {
    throw std::invalid_argument("link references unknown node");
  }
  if (port_caps.empty()) throw std::invalid_argument("link without ports");
  for (double c : port_caps) {
    if (!(c > 0.0)) throw std::invalid_argument("port capacity must be > 0");
  }
  if (!(weight_uv > 0.0) || !(weight_vu > 0.0)) {
    throw std::invalid_argument("IGP weights must be > 0");
  }
  pending_.push_back({u, v, port_caps, weight_uv, weight_vu, role});
  return static_cast<LinkId>(pending_.size()) - 1;
}

Network NetworkBuilder::build(int slots_per_card, double card_energy,
                              double port_energy) const {
  if (slots_per_card <= 0) {
    throw std::invalid_argument("slots_per_card must be positive");
  }
  Network net;
  net.node_names_ = names_;
  net.out_arcs_.assign(names_.size(), {});
  net.in_arcs_.assign(names_.size(), {});

  for (const PendingLink& pl : pending_) {
    Link l;
    l.id = static_cast<LinkId>(net.links_.size());
    l.u = pl.u;
    l.v = pl.v;
    Arc fwd{static_cast<ArcId>(net.arcs_.size()), pl.u, pl.v, l.id, pl.w_uv};
    Arc rev{fwd.id + 1, pl.v, pl.u, l.id, pl.w_vu};
    l.forward = fwd.id;
    l.reverse = rev.id;
    net.arcs_.push_back(fwd);
    net.arcs_.push_back(rev);
    net.out_arcs_[pl.u].push_back(fwd.id);
    net.in_arcs_[pl.v].push_back(fwd.id);
    net.out_arcs_[pl.v].push_back(rev.id);
    net.in_arcs_[pl.u].push_back(rev.id);
    for (double cap : pl.caps) {
      Port p;
      p.id = static_cast<PortId>(net.ports_.size());
      p.link = l.id;
      p.capacity = cap;
      p.role = pl.role;
      l.ports.push_back(p.id);
      net.ports_.push_back(p);
    }
    net.links_.push_back(std::move(l));
  }

  // One linecard per slots_per_card endpoints at each router, endpoints
  // assigned in port-id order.
  std::vector<int> next_free(names_.size(), 0);  // free slots on last card
  std::vector<CardId> last_card(names_.size(), -1);
  auto assign_endpoint = [&](NodeId router) -> CardId {
    if (next_free[router] == 0) {
      Linecard c;
      c.id = static_cast<CardId>(net.cards_.size());
      c.router = router;
      c.slots = slots_per_card;
      c.card_energy = card_energy;
      c.port_energy = port_energy;
      net.cards_.push_back(c);
      last_card[router] = c.id;
      next_free[router] = slots_per_card;
    }
    --next_free[router];
    return last_card[router];
  };
  for (Port& p : net.ports_) {
    const Link& l = net.links_[p.link];
    p.card_at_u = assign_endpoint(l.u);
    p.card_at_v = assign_endpoint(l.v);
  }
  return net;
}

}  // namespace greensr
