#include "greensr/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace greensr {

namespace {
constexpr double kLoadTol = 1e-9;
}

SrConfiguration spr_baseline(const Network& net, const TrafficMatrix& matrix,
                             const FlowFractionTable& table, double theta) {
  if (!(theta > 0.0) || theta > 1.0) {
    throw std::invalid_argument("theta must lie in (0, 1]");
  }
  SrConfiguration cfg;
  cfg.mode = SrMode::splitting;
  cfg.theta = theta;
  cfg.splits = spr_splits(matrix);
  cfg.arc_load = arc_traffic(table, matrix, cfg.splits);
  cfg.plan = ActivationPlan::all_active(net);

  for (const Link& link : net.links()) {
    const double need =
        std::max(cfg.arc_load[link.forward], cfg.arc_load[link.reverse]);
    double active_cap = 0.0;
    std::vector<PortId> removable;
    for (PortId p : link.ports) {
      active_cap += net.port(p).capacity;
      if (net.port(p).role == PortRole::backbone) removable.push_back(p);
    }
    if (need > theta * active_cap + kLoadTol) {
      cfg.warnings.push_back("link " + net.node_name(link.u) + "-" +
                             net.node_name(link.v) +
                             " exceeds theta under shortest-path routing; no "
                             "ports deactivated");
      continue;
    }
    // Smallest capacity first maximizes the count of removed ports.
    std::sort(removable.begin(), removable.end(), [&](PortId a, PortId b) {
      if (net.port(a).capacity != net.port(b).capacity) {
        return net.port(a).capacity < net.port(b).capacity;
      }
      return a < b;
    });
    for (PortId p : removable) {
      const double cap_after = active_cap - net.port(p).capacity;
      if (need <= theta * cap_after + kLoadTol) {
        cfg.plan.port_active[p] = 0;
        active_cap = cap_after;
      } else {
        break;
      }
    }
  }

  pack_linecards(net, cfg.plan);
  const MluReport mlu = evaluate_mlu(net, cfg.plan, cfg.arc_load);
  cfg.arc_utilization = mlu.utilization;
  cfg.mlu = mlu.mlu;
  const EnergyReport energy = energy_report(net, cfg.plan);
  cfg.ports_total = energy.ports_total;
  cfg.ports_inactive = energy.ports_inactive;
  cfg.linecards_total = energy.linecards_total;
  cfg.linecards_inactive = energy.linecards_inactive;
  cfg.energy_saving = energy.saving;
  cfg.feasible = true;
  cfg.solver_status = lp::SolveStatus::optimal;
  return cfg;
}

void pack_linecards(const Network& net, ActivationPlan& plan,
                    int ports_per_linecard) {
  if (ports_per_linecard <= 0) {
    throw std::invalid_argument("ports_per_linecard must be positive");
  }
  if (plan.port_active.size() != net.ports().size()) {
    throw std::invalid_argument("plan does not cover this network's ports");
  }
  plan.card_active.assign(net.linecards().size(), 1);
  plan.remap_card_at_u.assign(net.ports().size(), -1);
  plan.remap_card_at_v.assign(net.ports().size(), -1);

  struct Endpoint {
    PortId port;
    bool u_side;
    bool active;
  };
  std::vector<std::vector<Endpoint>> at_router(net.node_count());
  for (const Link& l : net.links()) {
    for (PortId p : l.ports) {
      const bool active = plan.is_port_active(p);
      at_router[l.u].push_back({p, true, active});
      at_router[l.v].push_back({p, false, active});
    }
  }
  std::vector<std::vector<CardId>> cards(net.node_count());
  for (const Linecard& c : net.linecards()) cards[c.router].push_back(c.id);

  for (NodeId r = 0; r < net.node_count(); ++r) {
    auto& eps = at_router[r];
    int inactive_backbone = 0;
    for (const Endpoint& e : eps) {
      if (!e.active && net.port(e.port).role == PortRole::backbone) {
        ++inactive_backbone;
      }
    }
    const int off = inactive_backbone / ports_per_linecard;
    auto& rc = cards[r];
    // Highest-id cards of the router go dark; the one-time remap packs
    // active endpoints onto the remaining cards first.
    for (int k = 0; k < off && k < static_cast<int>(rc.size()); ++k) {
      plan.card_active[rc[rc.size() - 1 - k]] = 0;
    }
    std::stable_sort(eps.begin(), eps.end(),
                     [](const Endpoint& a, const Endpoint& b) {
                       return a.active > b.active;
                     });
    std::vector<CardId> order;
    for (CardId c : rc) {
      if (plan.is_card_active(c)) order.push_back(c);
    }
    for (CardId c : rc) {
      if (!plan.is_card_active(c)) order.push_back(c);
    }
    size_t card_idx = 0;
    int used = 0;
    for (const Endpoint& e : eps) {
      while (card_idx < order.size() &&
             used >= net.linecards()[order[card_idx]].slots) {
        ++card_idx;
        used = 0;
      }
      if (card_idx >= order.size()) {
        throw std::logic_error("linecard packing ran out of slots");
      }
      const CardId c = order[card_idx];
      ++used;
      if (e.u_side) {
        plan.remap_card_at_u[e.port] = c;
      } else {
        plan.remap_card_at_v[e.port] = c;
      }
    }
  }
}

MluReport evaluate_mlu(const Network& net, const ActivationPlan& plan,
                       const std::vector<double>& arc_load) {
  if (arc_load.size() != net.arcs().size()) {
    throw std::invalid_argument("load vector does not cover all arcs");
  }
  MluReport rep;
  rep.utilization.assign(net.arcs().size(), 0.0);
  for (const Arc& a : net.arcs()) {
    const double cap = net.arc_capacity(a.id, plan);
    if (cap <= 0.0) {
      // Splitting fractions may leave numeric dust well below any real
      // traffic; everything past 1e-6 of nominal capacity is an error.
      if (arc_load[a.id] > 1e-6 * net.arc_capacity(a.id) + kLoadTol) {
        throw std::runtime_error("traffic on fully deactivated arc " +
                                 net.node_name(a.from) + "->" +
                                 net.node_name(a.to));
      }
      continue;
    }
    rep.utilization[a.id] = arc_load[a.id] / cap;
    rep.mlu = std::max(rep.mlu, rep.utilization[a.id]);
  }
  return rep;
}

EnergyReport energy_report(const Network& net, const ActivationPlan& plan,
                           double linecard_share) {
  if (linecard_share < 0.0 || linecard_share > 1.0) {
    throw std::invalid_argument("linecard share must lie in [0, 1]");
  }
  EnergyReport rep;
  rep.linecard_share = linecard_share;
  rep.ports_total = static_cast<int>(net.ports().size());
  rep.ports_inactive = plan.inactive_port_count();
  rep.linecards_total = static_cast<int>(net.linecards().size());
  rep.linecards_inactive = plan.inactive_card_count();
  std::vector<int> per_router(net.node_count(), 0);
  for (const Linecard& c : net.linecards()) {
    if (!plan.is_card_active(c.id)) ++per_router[c.router];
  }
  for (NodeId r = 0; r < net.node_count(); ++r) {
    if (per_router[r] > 0) {
      rep.inactive_cards_per_router.push_back({r, per_router[r]});
    }
  }
  rep.saving =
      rep.linecards_total == 0
          ? 0.0
          : linecard_share * (static_cast<double>(rep.linecards_inactive) /
                              rep.linecards_total);
  return rep;
}

}  // namespace greensr
