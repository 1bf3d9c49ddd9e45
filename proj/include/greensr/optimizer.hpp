#pragma once

#include <string>
#include <vector>

#include "greensr/flow_fractions.hpp"
#include "greensr/lp.hpp"
#include "greensr/network.hpp"
#include "greensr/traffic.hpp"

namespace greensr {

enum class SrMode { splitting, no_splitting };

const char* to_string(SrMode m);

struct OptimizationParams {
  double theta = 0.7;  // MLU upper bound
  SrMode mode = SrMode::splitting;
  EcmpMode ecmp = EcmpMode::even_split;
  lp::Limits solver_limits;  // default 1h

  /// Optional restriction of the intermediate-node candidates; empty means
  /// all of V. The destination itself is always a candidate.
  std::vector<NodeId> candidate_intermediates;

  int ports_per_linecard = 8;
  double linecard_energy_share = 0.8;

  /// Port-elimination passes after rounding. Auto-disabled on instances
  /// beyond small scale; each attempt costs one feasibility re-solve.
  bool refine = true;
  int refine_max_attempts = 64;

  /// Keep only the K largest demands before modeling (0 = all). Intended
  /// for instances whose LP would otherwise exceed the solver's row cap or
  /// the time budget; the drop is recorded on the configuration.
  int max_demand_rows = 0;
};

/// A full 2-SR routing answer: splitting fractions, the port/linecard
/// activation plan, and the achieved loads.
struct SrConfiguration {
  SrMode mode = SrMode::splitting;
  double theta = 0.7;
  SplitPlan splits;
  ActivationPlan plan;
  std::vector<double> arc_load;
  std::vector<double> arc_utilization;
  double mlu = 0.0;

  int ports_total = 0;
  int ports_inactive = 0;
  int linecards_total = 0;
  int linecards_inactive = 0;
  double energy_saving = 0.0;

  lp::SolveStatus solver_status = lp::SolveStatus::optimal;
  bool feasible = false;
  bool lp_integral_ports = false;  // relaxation already integral
  bool used_spr_fallback = false;  // identity routing beat the rounded LP
  int downsampled_demands = 0;     // demands dropped before modeling
  double lp_objective = 0.0;       // relaxation port sum (lower bound)
  double inactive_port_share() const {
    return ports_total == 0 ? 0.0
                            : static_cast<double>(ports_inactive) / ports_total;
  }
  double inactive_linecard_share() const {
    return linecards_total == 0 ? 0.0
                                : static_cast<double>(linecards_inactive) /
                                      linecards_total;
  }
  std::vector<std::string> warnings;
};

/// The explicit port-minimizing program: x^w_uv columns for every nonzero
/// demand and every candidate w (binary in no-splitting mode), pi in [0, 1]
/// per port with access ports fixed at 1, per-demand convexity rows, and
/// one capacity row per arc with both directions drawing on the same pi.
/// Arc rows are scaled by 1/(theta c(a)). Refuses nonsensically large
/// instances; optimize() generates x columns lazily instead.
lp::Model build_port_lp(const Network& net, const TrafficMatrix& matrix,
                        const FlowFractionTable& table,
                        const OptimizationParams& params);

/// Rounds a fractional routing up to whole ports: per link, the minimal
/// count of its ports (largest capacity first) covering the worse of the
/// two directions at theta, access ports always active. Returns the fully
/// evaluated configuration (linecards packed, MLU and energy recomputed).
SrConfiguration round_ports(const Network& net, const SplitPlan& splits,
                            const TrafficMatrix& matrix,
                            const FlowFractionTable& table,
                            const OptimizationParams& params);

/// End-to-end pipeline: fractions -> model -> solve -> round -> evaluate,
/// with lazy pricing of the x columns and an optional port-elimination
/// refinement. In no-splitting mode the relaxation is dived to an integral
/// per-demand choice under the solver limits, accepting the best found.
SrConfiguration optimize(const Network& net, const TrafficMatrix& matrix,
                         const OptimizationParams& params);

enum class OracleObjective { linecards, ports };

/// Provably optimal configuration by exhaustive enumeration of per-link
/// active-port counts with a routing-feasibility LP per candidate. Only for
/// tiny instances (<= 6 nodes, <= 12 backbone ports); refuses otherwise.
SrConfiguration exact_oracle(const Network& net, const TrafficMatrix& matrix,
                             const OptimizationParams& params,
                             OracleObjective objective);

}  // namespace greensr
