#pragma once

#include "greensr/optimizer.hpp"

namespace greensr {

/// Shortest-path-routing baseline: routing fixed to the identity (w = v),
/// then per link the largest number of ports is removed, smallest capacity
/// first, while the worse direction stays within theta of the remaining
/// capacity. Links whose SPR load already violates theta keep all ports and
/// are flagged on the configuration.
SrConfiguration spr_baseline(const Network& net, const TrafficMatrix& matrix,
                             const FlowFractionTable& table, double theta);

/// Marks linecards off, one per ports_per_linecard inactive backbone
/// endpoints at each router (floor), and records the implied endpoint
/// remapping so active ports sit on active cards.
void pack_linecards(const Network& net, ActivationPlan& plan,
                    int ports_per_linecard = 8);

struct MluReport {
  std::vector<double> utilization;  // per arc; 0 for deactivated arcs
  double mlu = 0.0;
};

/// LU(a) = tr(a) / active capacity; arcs with zero active capacity must
/// carry zero traffic. The MLU ranges over arcs with active capacity.
MluReport evaluate_mlu(const Network& net, const ActivationPlan& plan,
                       const std::vector<double>& arc_load);

struct EnergyReport {
  int linecards_total = 0;
  int linecards_inactive = 0;
  int ports_total = 0;
  int ports_inactive = 0;
  double linecard_share = 0.8;  // of total network energy
  double saving = 0.0;          // linecard_share * inactive fraction
  std::vector<std::pair<NodeId, int>> inactive_cards_per_router;
};

EnergyReport energy_report(const Network& net, const ActivationPlan& plan,
                           double linecard_share = 0.8);

}  // namespace greensr
