#include "greensr/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "greensr/baseline.hpp"

namespace greensr {

namespace {

constexpr double kPriceTol = 1e-7;
constexpr double kOverflowTol = 1e-6;
constexpr double kLoadTol = 1e-9;
constexpr int kMaxPricingRounds = 400;
constexpr int kPricingBatch = 4000;

using Clock = std::chrono::steady_clock;

double elapsed_sec(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

void validate_params(const OptimizationParams& p) {
  if (!(p.theta > 0.0) || p.theta > 1.0) {
    throw std::invalid_argument("theta must lie in (0, 1]");
  }
  if (p.ports_per_linecard <= 0) {
    throw std::invalid_argument("ports_per_linecard must be positive");
  }
}

std::string demand_label(const Network& net, NodeId u, NodeId v) {
  return net.node_name(u) + "->" + net.node_name(v);
}

void check_reachability(const Network& net, const FlowFractionTable& table,
                        const std::vector<TrafficMatrix::Demand>& demands) {
  for (const auto& d : demands) {
    if (!table.reachable(d.src, d.dst)) {
      throw std::invalid_argument("demand " + demand_label(net, d.src, d.dst) +
                                  " is infeasible by construction: no path");
    }
  }
}

struct DemandRow {
  NodeId u;
  NodeId v;
  double t;
  int row;
  bool fixed = false;    // no-splitting mode: committed to one intermediate
  NodeId fixed_w = -1;
};

// Restricted master of the port-minimizing program. Demand convexity rows
// come first, then one capacity row per arc scaled by 1/(theta c(a)) so
// every row is O(1). x columns are generated through exact pricing; per-arc
// overflow columns sigma make stage A (min total overflow) always feasible,
// stage B minimizes the port sum with sigma closed.
class PortMaster {
 public:
  struct XCol {
    int demand;
    NodeId w;
    int var;
  };

  PortMaster(const Network& net, const TrafficMatrix& matrix,
             const FlowFractionTable& table, const OptimizationParams& params,
             bool materialize_all, bool with_sigma, bool load_tiebreak)
      : net_(net), table_(table), params_(params),
        load_tiebreak_(load_tiebreak) {
    const auto nonzero = matrix.nonzero();
    check_reachability(net, table, nonzero);
    arc_scale_.resize(net.arcs().size());
    for (const Arc& a : net.arcs()) {
      arc_scale_[a.id] = 1.0 / (params.theta * net.arc_capacity(a.id));
    }
    for (const auto& d : nonzero) {
      const int row = model_.add_constraint(
          "d_" + std::to_string(d.src) + "_" + std::to_string(d.dst), {},
          lp::RowSense::eq, 1.0);
      demands_.push_back({d.src, d.dst, d.volume, row, false, -1});
    }
    arc_row0_ = model_.row_count();
    pi_var_.resize(net.ports().size(), -1);
    for (const Port& p : net.ports()) {
      const bool access = p.role == PortRole::access;
      pi_var_[p.id] =
          model_.add_variable("p" + std::to_string(p.id), access ? 1.0 : 0.0,
                              1.0, lp::VarKind::continuous, 1.0);
    }
    for (const Arc& a : net.arcs()) {
      std::vector<std::pair<int, double>> terms;
      const double cap = net.arc_capacity(a.id);
      for (PortId p : net.link(a.link).ports) {
        terms.push_back({pi_var_[p], -net.port(p).capacity / cap});
      }
      model_.add_constraint("cap_a" + std::to_string(a.id), terms,
                            lp::RowSense::le, 0.0);
    }
    if (with_sigma) {
      sigma_var_.resize(net.arcs().size(), -1);
      for (const Arc& a : net.arcs()) {
        sigma_var_[a.id] = model_.add_column(
            "ovf_a" + std::to_string(a.id), 0.0, 0.0, lp::VarKind::continuous,
            0.0, {{arc_row0_ + a.id, -1.0}});
      }
    }
    // Secondary objective weight: prefer the least total traffic among
    // port-minimal routings. Small enough that it can never trade a port.
    load_eps_ =
        load_tiebreak_ ? 0.1 / std::max<size_t>(1, net.ports().size()) : 0.0;
    const int n = net.node_count();
    pair_scale_.assign(static_cast<size_t>(n) * n, 0.0);
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId t = 0; t < n; ++t) {
        if (s == t || !table.reachable(s, t)) continue;
        double acc = 0.0;
        for (const auto* e = table.begin(s, t); e != table.end(s, t); ++e) {
          acc += e->fraction * arc_scale_[e->arc];
        }
        pair_scale_[static_cast<size_t>(s) * n + t] = acc;
      }
    }
    have_w_.assign(demands_.size(),
                   std::vector<std::uint8_t>(net.node_count(), 0));
    if (materialize_all) {
      for (size_t d = 0; d < demands_.size(); ++d) {
        for (NodeId w : candidates_for(static_cast<int>(d))) {
          add_x(static_cast<int>(d), w);
        }
      }
    } else {
      for (size_t d = 0; d < demands_.size(); ++d) {
        add_x(static_cast<int>(d), demands_[d].v);  // identity routing
      }
    }
  }

  lp::Model& model() { return model_; }
  std::vector<DemandRow>& demands() { return demands_; }
  const std::vector<XCol>& xcols() const { return xcols_; }
  int pi_of(PortId p) const { return pi_var_[p]; }
  bool has_sigma() const { return !sigma_var_.empty(); }

  std::vector<NodeId> candidates_for(int d) const {
    std::vector<NodeId> out;
    const NodeId u = demands_[d].u;
    const NodeId v = demands_[d].v;
    if (params_.candidate_intermediates.empty()) {
      for (NodeId w = 0; w < net_.node_count(); ++w) {
        if (w != u) out.push_back(w);
      }
    } else {
      out = params_.candidate_intermediates;
      out.push_back(v);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      out.erase(std::remove(out.begin(), out.end(), u), out.end());
    }
    return out;
  }

  double load_cost(int d, NodeId w) const {
    const DemandRow& dem = demands_[d];
    const int n = net_.node_count();
    return load_eps_ * dem.t *
           (pair_scale_[static_cast<size_t>(dem.u) * n + w] +
            pair_scale_[static_cast<size_t>(w) * n + dem.v]);
  }

  int add_x(int d, NodeId w) {
    if (have_w_[d][w]) {
      for (const XCol& c : xcols_) {
        if (c.demand == d && c.w == w) return c.var;
      }
    }
    const DemandRow& dem = demands_[d];
    std::vector<std::pair<int, double>> terms{{dem.row, 1.0}};
    for_each_two_segment_arc(table_, dem.u, dem.v, w, [&](ArcId a, double g) {
      terms.push_back({arc_row0_ + a, dem.t * g * arc_scale_[a]});
    });
    const int var = model_.add_column(
        "x_" + std::to_string(dem.u) + "_" + std::to_string(dem.v) + "_" +
            std::to_string(w),
        0.0, 1.0,
        params_.mode == SrMode::no_splitting ? lp::VarKind::binary
                                             : lp::VarKind::continuous,
        stage_a_ ? 0.0 : load_cost(d, w), terms);
    have_w_[d][w] = 1;
    xcols_.push_back({d, w, var});
    return var;
  }

  // Stage A prices against the overflow objective, stage B against the port
  // sum plus the load tiebreak; the formula is the same, only duals differ.
  void set_stage(bool overflow_stage) {
    stage_a_ = overflow_stage;
    for (int pv : pi_var_) {
      model_.set_objective_coef(pv, overflow_stage ? 0.0 : 1.0);
    }
    for (const XCol& c : xcols_) {
      model_.set_objective_coef(c.var,
                                overflow_stage ? 0.0 : load_cost(c.demand, c.w));
    }
    for (int s : sigma_var_) {
      model_.set_bounds(s, 0.0, overflow_stage ? lp::kInfinity : 0.0);
      model_.set_objective_coef(s, overflow_stage ? 1.0 : 0.0);
    }
  }

  double total_overflow(const lp::Solution& sol) const {
    double sum = 0.0;
    for (int s : sigma_var_) sum += sol.values[s];
    return sum;
  }

  double port_sum(const lp::Solution& sol) const {
    double sum = 0.0;
    for (int pv : pi_var_) sum += sol.values[pv];
    return sum;
  }

  // Reduced cost of x^w_uv: -alpha_uv - t_uv (F(u,w) + F(w,v)) with
  // F(s,t) = sum_a f_st(a) beta_a / (theta c(a)). One pass is O(V^2) plus
  // O(demands x V), independent of how many columns exist.
  int price_and_add(const lp::Solution& sol, int max_new) {
    const int n = net_.node_count();
    std::vector<double> f(static_cast<size_t>(n) * n, 0.0);
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId t = 0; t < n; ++t) {
        if (s == t || !table_.reachable(s, t)) continue;
        double acc = 0.0;
        for (const auto* e = table_.begin(s, t); e != table_.end(s, t); ++e) {
          acc += e->fraction * sol.duals[arc_row0_ + e->arc] *
                 arc_scale_[e->arc];
        }
        f[static_cast<size_t>(s) * n + t] = acc;
      }
    }
    struct Candidate {
      double rc;
      int d;
      NodeId w;
    };
    std::vector<Candidate> found;
    for (size_t d = 0; d < demands_.size(); ++d) {
      const DemandRow& dem = demands_[d];
      if (dem.fixed) continue;
      const double alpha = sol.duals[dem.row];
      for (NodeId w : candidates_for(static_cast<int>(d))) {
        if (have_w_[d][w]) continue;
        if (!table_.reachable(dem.u, w) || !table_.reachable(w, dem.v)) {
          continue;
        }
        const double cost =
            stage_a_ ? 0.0 : load_cost(static_cast<int>(d), w);
        const double rc =
            cost - alpha - dem.t * (f[static_cast<size_t>(dem.u) * n + w] +
                                    f[static_cast<size_t>(w) * n + dem.v]);
        if (rc < -kPriceTol) found.push_back({rc, static_cast<int>(d), w});
      }
    }
    std::sort(found.begin(), found.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.rc != b.rc) return a.rc < b.rc;
                if (a.d != b.d) return a.d < b.d;
                return a.w < b.w;
              });
    const int take = std::min<int>(max_new, static_cast<int>(found.size()));
    for (int i = 0; i < take; ++i) add_x(found[i].d, found[i].w);
    return take;
  }

  // Columns priced in after `sol` was produced are zero in it.
  static double value_of(const lp::Solution& sol, int var) {
    return var < static_cast<int>(sol.values.size()) ? sol.values[var] : 0.0;
  }

  SplitPlan extract_splits(const lp::Solution& sol) const {
    SplitPlan out(demands_.size());
    for (size_t d = 0; d < demands_.size(); ++d) {
      out[d].src = demands_[d].u;
      out[d].dst = demands_[d].v;
    }
    for (const XCol& c : xcols_) {
      const double v = value_of(sol, c.var);
      if (v > 1e-9) out[c.demand].via.push_back({c.w, v});
    }
    for (auto& s : out) {
      double sum = 0.0;
      for (auto& [w, frac] : s.via) sum += frac;
      if (sum <= 0.0) {
        throw std::logic_error("empty splitting row for demand " +
                               demand_label(net_, s.src, s.dst));
      }
      for (auto& [w, frac] : s.via) frac /= sum;
      double resum = 0.0;
      for (auto& [w, frac] : s.via) resum += frac;
      s.via.front().second += 1.0 - resum;
      std::sort(s.via.begin(), s.via.end());
    }
    return out;
  }

 private:
  const Network& net_;
  const FlowFractionTable& table_;
  const OptimizationParams& params_;
  lp::Model model_;
  std::vector<DemandRow> demands_;
  int arc_row0_ = 0;
  std::vector<int> pi_var_;
  std::vector<int> sigma_var_;
  std::vector<std::vector<std::uint8_t>> have_w_;
  std::vector<XCol> xcols_;
  std::vector<double> arc_scale_;
  std::vector<double> pair_scale_;  // sum_a f_st(a) / (theta c(a))
  bool load_tiebreak_ = true;
  bool stage_a_ = false;
  double load_eps_ = 0.0;
};

// One column-generation stage: re-solve, price, repeat until no column
// prices out. Returns the final LP solution.
lp::Solution solve_stage(PortMaster& master, lp::SimplexSolver& session,
                         bool overflow_stage, Clock::time_point t0,
                         double budget_sec) {
  master.set_stage(overflow_stage);
  lp::Solution sol;
  for (int round = 0; round < kMaxPricingRounds; ++round) {
    lp::Limits limits;
    limits.time_limit_sec = std::max(1e-3, budget_sec - elapsed_sec(t0));
    sol = session.solve(limits);
    if (sol.status != lp::SolveStatus::optimal) return sol;
    if (master.price_and_add(sol, kPricingBatch) == 0) return sol;
  }
  sol.status = lp::SolveStatus::iteration_limit;  // pricing did not converge
  sol.feasible = false;
  return sol;
}

// Per-link round-up: access ports stay on, then the largest eligible
// backbone ports are kept until theta times the kept capacity covers the
// worse direction. `allowed` masks ports committed off by the caller.
ActivationPlan round_plan(const Network& net, const std::vector<double>& load,
                          double theta, const std::vector<std::uint8_t>* allowed) {
  ActivationPlan plan;
  plan.port_active.assign(net.ports().size(), 0);
  plan.card_active.assign(net.linecards().size(), 1);
  for (const Link& link : net.links()) {
    const double need = std::max(load[link.forward], load[link.reverse]);
    const double full_cap = net.arc_capacity(link.forward);
    double cap = 0.0;
    std::vector<PortId> eligible;
    for (PortId p : link.ports) {
      if (net.port(p).role == PortRole::access) {
        plan.port_active[p] = 1;
        cap += net.port(p).capacity;
      } else if (allowed == nullptr || (*allowed)[p]) {
        eligible.push_back(p);
      }
    }
    std::sort(eligible.begin(), eligible.end(), [&](PortId a, PortId b) {
      if (net.port(a).capacity != net.port(b).capacity) {
        return net.port(a).capacity > net.port(b).capacity;
      }
      return a < b;
    });
    // Accept within the solver's feasibility tolerance (the final MLU check
    // allows theta + 1e-6); a fully dark link may carry residual numeric
    // dust up to 1e-6 of its nominal capacity.
    const auto covered = [&]() {
      if (cap > 0.0) return need <= theta * cap * (1.0 + 1e-6) + kLoadTol;
      return need <= 1e-6 * full_cap + kLoadTol;
    };
    for (PortId p : eligible) {
      if (covered()) break;
      plan.port_active[p] = 1;
      cap += net.port(p).capacity;
    }
    if (!covered()) {
      throw std::runtime_error(
          "rounding cannot cover the load on link " + net.node_name(link.u) +
          "-" + net.node_name(link.v) +
          "; the routing was not feasible for the relaxation");
    }
  }
  return plan;
}

// Packs linecards, evaluates utilization and energy, and runs the
// cross-module validity checks every optimizer output must satisfy.
void finalize_config(const Network& net, const FlowFractionTable& table,
                     const TrafficMatrix& matrix,
                     const OptimizationParams& params, SrConfiguration& cfg,
                     bool enforce_theta) {
  cfg.arc_load = arc_traffic(table, matrix, cfg.splits);
  pack_linecards(net, cfg.plan, params.ports_per_linecard);
  const MluReport mlu = evaluate_mlu(net, cfg.plan, cfg.arc_load);
  cfg.arc_utilization = mlu.utilization;
  cfg.mlu = mlu.mlu;
  const EnergyReport energy =
      energy_report(net, cfg.plan, params.linecard_energy_share);
  cfg.ports_total = energy.ports_total;
  cfg.ports_inactive = energy.ports_inactive;
  cfg.linecards_total = energy.linecards_total;
  cfg.linecards_inactive = energy.linecards_inactive;
  cfg.energy_saving = energy.saving;
  const auto violations = validate_plan(net, cfg.plan);
  if (!violations.empty()) {
    throw std::logic_error("optimizer produced an invalid plan: " +
                           violations.front().rule);
  }
  if (enforce_theta && cfg.mlu > params.theta + 1e-6) {
    throw std::logic_error("optimizer exceeded theta: mlu " +
                           std::to_string(cfg.mlu));
  }
  cfg.feasible = true;
}

int active_ports(const ActivationPlan& plan) {
  int n = 0;
  for (auto s : plan.port_active) n += s ? 1 : 0;
  return n;
}

TrafficMatrix downsample(const TrafficMatrix& matrix, int keep,
                         int* dropped_out) {
  auto demands = matrix.nonzero();
  *dropped_out = 0;
  if (keep <= 0 || static_cast<int>(demands.size()) <= keep) return matrix;
  std::sort(demands.begin(), demands.end(),
            [](const TrafficMatrix::Demand& a, const TrafficMatrix::Demand& b) {
              if (a.volume != b.volume) return a.volume > b.volume;
              if (a.src != b.src) return a.src < b.src;
              return a.dst < b.dst;
            });
  TrafficMatrix out(matrix.node_count());
  for (int i = 0; i < keep; ++i) {
    out.set(demands[i].src, demands[i].dst, demands[i].volume);
  }
  *dropped_out = static_cast<int>(demands.size()) - keep;
  return out;
}

bool ports_integral(const lp::Solution& sol, const PortMaster& master,
                    const Network& net) {
  for (const Port& p : net.ports()) {
    const double v = sol.values[master.pi_of(p.id)];
    if (std::abs(v - std::round(v)) > 1e-6) return false;
  }
  return true;
}

struct PipelineState {
  std::unique_ptr<PortMaster> master;
  std::unique_ptr<lp::SimplexSolver> session;
  lp::Solution last;
};

// Drives stage A then stage B; returns false when no optimal relaxation was
// reached (status carried in state.last).
bool solve_relaxation(PipelineState& st, SrConfiguration& cfg,
                      Clock::time_point t0, double budget) {
  lp::Solution a = solve_stage(*st.master, *st.session, true, t0, budget);
  if (getenv("GREENSR_TRACE")) {
    fprintf(stderr, "[stageA] status=%s obj=%.3e overflow=%.3e iters=%ld\n",
            lp::to_string(a.status), a.objective,
            a.feasible ? st.master->total_overflow(a) : -1.0,
            a.stats.iterations);
  }
  if (a.status != lp::SolveStatus::optimal) {
    st.last = a;
    cfg.solver_status = a.status;
    return false;
  }
  if (st.master->total_overflow(a) > kOverflowTol) {
    st.last = a;
    cfg.solver_status = lp::SolveStatus::infeasible;
    cfg.warnings.push_back(
        "no 2-SR routing keeps every arc within theta at full capacity");
    return false;
  }
  lp::Solution b = solve_stage(*st.master, *st.session, false, t0, budget);
  if (getenv("GREENSR_TRACE")) {
    fprintf(stderr,
            "[stageB] status=%s obj=%.6f iters=%ld ph1=%ld infeas=%.3e\n",
            lp::to_string(b.status), b.objective, b.stats.iterations,
            b.stats.phase1_iterations, b.stats.infeasibility);
  }
  if (b.status != lp::SolveStatus::optimal) {
    // The stage-A point is still a feasible routing; fall back to it.
    st.last = a;
    cfg.solver_status = b.status;
    cfg.warnings.push_back(
        "port minimization hit its limit; rounding the last feasible "
        "routing");
    st.master->set_stage(false);
    return true;
  }
  st.last = b;
  cfg.solver_status = lp::SolveStatus::optimal;
  return true;
}

// No-splitting mode: dive the relaxation to one intermediate per demand.
// Batches of nearly-integral demands are fixed first; a batch that breaks
// feasibility is retried one demand at a time, then alternative w choices.
bool dive_to_integral(PipelineState& st, SrConfiguration& cfg,
                      Clock::time_point t0, double budget) {
  PortMaster& master = *st.master;
  auto& demands = master.demands();
  auto fractional_of = [&](const lp::Solution& sol) {
    // Demand index -> (w, value) of its largest fraction, for unfixed
    // demands that are not yet integral.
    std::vector<std::pair<int, std::pair<NodeId, double>>> out;
    std::vector<double> best(demands.size(), 0.0);
    std::vector<NodeId> best_w(demands.size(), -1);
    for (const auto& c : master.xcols()) {
      const double v = PortMaster::value_of(sol, c.var);
      if (v > best[c.demand]) {
        best[c.demand] = v;
        best_w[c.demand] = c.w;
      }
    }
    for (size_t d = 0; d < demands.size(); ++d) {
      if (demands[d].fixed) continue;
      if (best[d] < 1.0 - 1e-6) {
        out.push_back({static_cast<int>(d), {best_w[d], best[d]}});
      } else {
        demands[d].fixed = true;  // already integral; freeze it
        demands[d].fixed_w = best_w[d];
        master.model().set_bounds(master.add_x(static_cast<int>(d), best_w[d]),
                                  1.0, 1.0);
      }
    }
    return out;
  };

  auto try_fix = [&](const std::vector<std::pair<int, NodeId>>& batch)
      -> std::pair<bool, lp::Solution> {
    std::vector<int> vars;
    for (const auto& [d, w] : batch) {
      const int var = master.add_x(d, w);
      master.model().set_bounds(var, 1.0, 1.0);
      vars.push_back(var);
    }
    lp::Solution a = solve_stage(master, *st.session, true, t0, budget);
    const bool ok = a.status == lp::SolveStatus::optimal &&
                    master.total_overflow(a) <= kOverflowTol;
    if (!ok) {
      for (int var : vars) master.model().set_bounds(var, 0.0, 1.0);
      return {false, a};
    }
    for (const auto& [d, w] : batch) {
      demands[d].fixed = true;
      demands[d].fixed_w = w;
    }
    lp::Solution b = solve_stage(master, *st.session, false, t0, budget);
    if (b.status != lp::SolveStatus::optimal) return {true, a};
    return {true, b};
  };

  while (true) {
    if (elapsed_sec(t0) > budget) {
      cfg.solver_status = lp::SolveStatus::time_limit;
      cfg.warnings.push_back("no-splitting dive ran out of time");
      return false;
    }
    auto frac = fractional_of(st.last);
    if (frac.empty()) return true;
    // Most committed first.
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
      if (a.second.second != b.second.second) {
        return a.second.second > b.second.second;
      }
      return a.first < b.first;
    });
    std::vector<std::pair<int, NodeId>> batch;
    for (const auto& [d, wv] : frac) {
      if (wv.second >= 0.6) batch.push_back({d, wv.first});
    }
    if (batch.empty()) batch.push_back({frac.front().first, frac.front().second.first});

    auto [ok, sol] = try_fix(batch);
    if (ok) {
      st.last = sol;
      continue;
    }
    if (batch.size() > 1) {
      // Retry conservatively with the single most committed demand.
      batch.resize(1);
      auto [ok1, sol1] = try_fix(batch);
      if (ok1) {
        st.last = sol1;
        continue;
      }
    }
    // Try the remaining intermediates of that demand by decreasing value.
    const int d = batch.front().first;
    std::vector<std::pair<double, NodeId>> options;
    for (const auto& c : master.xcols()) {
      if (c.demand != d || c.w == batch.front().second) continue;
      const double v = PortMaster::value_of(st.last, c.var);
      if (v > 1e-9) options.push_back({v, c.w});
    }
    std::sort(options.rbegin(), options.rend());
    bool fixed = false;
    for (const auto& [v, w] : options) {
      auto [okw, solw] = try_fix({{d, w}});
      if (okw) {
        st.last = solw;
        fixed = true;
        break;
      }
    }
    if (!fixed) {
      cfg.solver_status = lp::SolveStatus::infeasible;
      cfg.warnings.push_back(
          "no-splitting dive found no feasible intermediate for demand " +
          std::to_string(demands[d].u) + "->" + std::to_string(demands[d].v));
      return false;
    }
  }
}

// Port-elimination refinement. Each round tentatively closes the marginal
// active port of every link still carrying one, re-solves the routing, and
// commits the closure whose re-solved program promises the fewest ports
// (load tiebreak included in the objective). Links that cannot lose a port
// are excluded from later rounds. Splitting mode only.
void refine_ports(const Network& net, const FlowFractionTable& table,
                  const TrafficMatrix& matrix, const OptimizationParams& params,
                  PipelineState& st, SplitPlan& splits, ActivationPlan& plan,
                  Clock::time_point t0, double budget) {
  PortMaster& master = *st.master;
  std::vector<std::uint8_t> allowed(net.ports().size(), 1);
  auto commit_bounds = [&]() {
    for (const Port& p : net.ports()) {
      if (p.role == PortRole::access) continue;
      const bool on = plan.is_port_active(p.id) && allowed[p.id];
      allowed[p.id] = on ? 1 : 0;
      master.model().set_bounds(master.pi_of(p.id), 0.0, on ? 1.0 : 0.0);
    }
  };
  commit_bounds();

  int attempts = 0;
  std::vector<std::uint8_t> hopeless(net.links().size(), 0);
  while (attempts < params.refine_max_attempts && elapsed_sec(t0) < budget) {
    const std::vector<double> load = arc_traffic(table, matrix, splits);
    struct Entry {
      double slack;
      LinkId link;
      PortId marginal;
    };
    std::vector<Entry> order;
    for (const Link& link : net.links()) {
      if (hopeless[link.id]) continue;
      PortId marginal = -1;  // smallest-capacity active backbone port
      double cap = 0.0;
      for (PortId p : link.ports) {
        if (!plan.is_port_active(p)) continue;
        cap += net.port(p).capacity;
        if (net.port(p).role != PortRole::backbone) continue;
        if (marginal < 0 ||
            net.port(p).capacity < net.port(marginal).capacity ||
            (net.port(p).capacity == net.port(marginal).capacity &&
             p > marginal)) {
          marginal = p;
        }
      }
      if (marginal < 0) continue;
      const double need = std::max(load[link.forward], load[link.reverse]);
      order.push_back({params.theta * cap - need, link.id, marginal});
    }
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
      if (a.slack != b.slack) return a.slack < b.slack;
      return a.link < b.link;
    });
    if (order.empty()) break;

    // Candidates are judged by what they round to, the LP value breaking
    // ties toward less total traffic.
    struct Best {
      int ports = 0;
      double objective = 0.0;
      PortId marginal = -1;
      SplitPlan splits;
      ActivationPlan plan;
      lp::Solution sol;
    } best;
    int routable_seen = 0;
    for (const Entry& e : order) {
      if (attempts >= params.refine_max_attempts ||
          elapsed_sec(t0) > budget || routable_seen >= 8) {
        break;
      }
      ++attempts;
      master.model().set_bounds(master.pi_of(e.marginal), 0.0, 0.0);
      lp::Solution a = solve_stage(master, *st.session, true, t0, budget);
      const bool routable = a.status == lp::SolveStatus::optimal &&
                            master.total_overflow(a) <= kOverflowTol;
      if (!routable) {
        master.model().set_bounds(master.pi_of(e.marginal), 0.0, 1.0);
        if (a.status == lp::SolveStatus::optimal) hopeless[e.link] = 1;
        continue;
      }
      lp::Solution b = solve_stage(master, *st.session, false, t0, budget);
      master.model().set_bounds(master.pi_of(e.marginal), 0.0, 1.0);
      if (b.status != lp::SolveStatus::optimal) continue;
      ++routable_seen;
      SplitPlan trial_splits = master.extract_splits(b);
      std::vector<std::uint8_t> trial_allowed = allowed;
      trial_allowed[e.marginal] = 0;
      ActivationPlan trial_plan = round_plan(
          net, arc_traffic(table, matrix, trial_splits), params.theta,
          &trial_allowed);
      int trial_ports = 0;
      for (auto s : trial_plan.port_active) trial_ports += s ? 1 : 0;
      if (getenv("GREENSR_TRACE")) {
        fprintf(stderr, "[refine] trial link=%d ports=%d obj=%.6f\n", e.link,
                trial_ports, b.objective);
      }
      if (best.marginal < 0 || trial_ports < best.ports ||
          (trial_ports == best.ports &&
           b.objective < best.objective - 1e-12)) {
        best = {trial_ports,          b.objective, e.marginal,
                std::move(trial_splits), std::move(trial_plan), std::move(b)};
      }
    }
    if (best.marginal < 0) break;
    if (getenv("GREENSR_TRACE")) {
      fprintf(stderr, "[refine] commit marginal=%d ports=%d obj=%.6f\n",
              best.marginal, best.ports, best.objective);
    }

    allowed[best.marginal] = 0;
    master.model().set_bounds(master.pi_of(best.marginal), 0.0, 0.0);
    plan = std::move(best.plan);
    splits = std::move(best.splits);
    st.last = std::move(best.sol);
    commit_bounds();
  }
}

}  // namespace

const char* to_string(SrMode m) {
  return m == SrMode::splitting ? "splitting" : "no-splitting";
}

lp::Model build_port_lp(const Network& net, const TrafficMatrix& matrix,
                        const FlowFractionTable& table,
                        const OptimizationParams& params) {
  validate_params(params);
  long long xcount = 0;
  const long long cand = params.candidate_intermediates.empty()
                             ? net.node_count()
                             : static_cast<long long>(
                                   params.candidate_intermediates.size() + 1);
  xcount = static_cast<long long>(matrix.nonzero().size()) * cand;
  if (xcount > 2'000'000) {
    throw std::invalid_argument(
        "explicit model would need " + std::to_string(xcount) +
        " routing columns; use optimize(), which generates them lazily");
  }
  PortMaster master(net, matrix, table, params, /*materialize_all=*/true,
                    /*with_sigma=*/false, /*load_tiebreak=*/false);
  return std::move(master.model());
}

SrConfiguration round_ports(const Network& net, const SplitPlan& splits,
                            const TrafficMatrix& matrix,
                            const FlowFractionTable& table,
                            const OptimizationParams& params) {
  validate_params(params);
  SrConfiguration cfg;
  cfg.mode = params.mode;
  cfg.theta = params.theta;
  cfg.splits = splits;
  const std::vector<double> load = arc_traffic(table, matrix, splits);
  cfg.plan = round_plan(net, load, params.theta, nullptr);
  finalize_config(net, table, matrix, params, cfg, /*enforce_theta=*/true);
  cfg.solver_status = lp::SolveStatus::optimal;
  return cfg;
}

SrConfiguration optimize(const Network& net, const TrafficMatrix& matrix,
                         const OptimizationParams& params) {
  validate_params(params);
  const auto t0 = Clock::now();
  const double budget = params.solver_limits.time_limit_sec;

  SrConfiguration cfg;
  cfg.mode = params.mode;
  cfg.theta = params.theta;

  const FlowFractionTable table = compute_flow_fractions(net, params.ecmp);
  check_reachability(net, table, matrix.nonzero());

  int dropped = 0;
  const TrafficMatrix working =
      downsample(matrix, params.max_demand_rows, &dropped);
  cfg.downsampled_demands = dropped;
  if (dropped > 0) {
    cfg.warnings.push_back("kept the " +
                           std::to_string(working.nonzero().size()) +
                           " largest demands, dropped " +
                           std::to_string(dropped));
  }
  const int rows = static_cast<int>(working.nonzero().size()) +
                   static_cast<int>(net.arcs().size());
  if (rows > 7500) {
    throw std::invalid_argument(
        "instance needs " + std::to_string(rows) +
        " rows, beyond the in-repo solver; set max_demand_rows to downsample");
  }

  PipelineState st;
  st.master = std::make_unique<PortMaster>(net, working, table, params,
                                           /*materialize_all=*/false,
                                           /*with_sigma=*/true,
                                           /*load_tiebreak=*/true);
  st.session = std::make_unique<lp::SimplexSolver>(st.master->model());

  if (!solve_relaxation(st, cfg, t0, budget)) {
    return cfg;  // infeasible or out of budget before any routing existed
  }
  cfg.lp_objective = st.master->port_sum(st.last);
  cfg.lp_integral_ports = ports_integral(st.last, *st.master, net);

  if (params.mode == SrMode::no_splitting) {
    if (!dive_to_integral(st, cfg, t0, budget)) {
      // Identity routing is integral; adopt it when it fits under theta.
      SrConfiguration base = spr_baseline(net, working, table, params.theta);
      if (base.warnings.empty()) {
        cfg.splits = base.splits;
        cfg.plan = base.plan;
        cfg.used_spr_fallback = true;
        finalize_config(net, table, working, params, cfg, true);
        return cfg;
      }
      cfg.feasible = false;
      return cfg;
    }
  }

  SplitPlan splits;
  if (params.mode == SrMode::no_splitting) {
    // The dive committed every demand; emit the exact unit choices.
    for (const DemandRow& d : st.master->demands()) {
      splits.push_back({d.u, d.v, {{d.fixed_w, 1.0}}});
    }
  } else {
    splits = st.master->extract_splits(st.last);
  }
  std::vector<double> load = arc_traffic(table, working, splits);
  ActivationPlan plan = round_plan(net, load, params.theta, nullptr);

  const bool small_enough =
      static_cast<int>(st.master->demands().size()) <= 600 &&
      static_cast<int>(net.links().size()) <= 220;
  if (params.refine && params.mode == SrMode::splitting && small_enough) {
    refine_ports(net, table, working, params, st, splits, plan, t0, budget);
  }

  cfg.splits = std::move(splits);
  cfg.plan = std::move(plan);

  // The identity routing is always in the feasible set; never do worse.
  SrConfiguration base = spr_baseline(net, working, table, params.theta);
  if (base.warnings.empty() &&
      active_ports(base.plan) < active_ports(cfg.plan)) {
    cfg.splits = base.splits;
    cfg.plan = base.plan;
    cfg.used_spr_fallback = true;
  }

  finalize_config(net, table, working, params, cfg, /*enforce_theta=*/true);
  return cfg;
}

SrConfiguration exact_oracle(const Network& net, const TrafficMatrix& matrix,
                             const OptimizationParams& params,
                             OracleObjective objective) {
  validate_params(params);
  if (net.node_count() > 6 || net.backbone_port_count() > 12) {
    throw std::invalid_argument(
        "exhaustive oracle refuses instances beyond 6 nodes / 12 backbone "
        "ports");
  }
  const FlowFractionTable table = compute_flow_fractions(net, params.ecmp);
  const auto demands = matrix.nonzero();
  check_reachability(net, table, demands);

  SrConfiguration cfg;
  cfg.mode = params.mode;
  cfg.theta = params.theta;

  // Per link: number of kept backbone ports, largest capacities first.
  std::vector<std::vector<PortId>> backbone(net.links().size());
  for (const Link& l : net.links()) {
    for (PortId p : l.ports) {
      if (net.port(p).role == PortRole::backbone) {
        backbone[l.id].push_back(p);
      }
    }
    std::sort(backbone[l.id].begin(), backbone[l.id].end(),
              [&](PortId a, PortId b) {
                if (net.port(a).capacity != net.port(b).capacity) {
                  return net.port(a).capacity > net.port(b).capacity;
                }
                return a < b;
              });
  }

  const double card_energy =
      net.linecards().empty() ? 1.0 : net.linecards().front().card_energy;
  const double port_energy =
      net.linecards().empty() ? 0.0 : net.linecards().front().port_energy;
  const int slots = net.linecards().empty() ? params.ports_per_linecard
                                            : net.linecards().front().slots;

  struct CandidatePlan {
    double objective;
    std::vector<int> counts;
  };
  std::vector<CandidatePlan> candidates;
  std::vector<int> counts(net.links().size(), 0);
  const auto plan_for = [&](const std::vector<int>& cnt) {
    ActivationPlan plan;
    plan.port_active.assign(net.ports().size(), 0);
    plan.card_active.assign(net.linecards().size(), 1);
    for (const Port& p : net.ports()) {
      if (p.role == PortRole::access) plan.port_active[p.id] = 1;
    }
    for (const Link& l : net.links()) {
      for (int k = 0; k < cnt[l.id]; ++k) {
        plan.port_active[backbone[l.id][k]] = 1;
      }
    }
    return plan;
  };
  const auto objective_of = [&](const ActivationPlan& plan) {
    int ports_on = 0;
    for (auto s : plan.port_active) ports_on += s ? 1 : 0;
    if (objective == OracleObjective::ports) return static_cast<double>(ports_on);
    // Linecard objective under the reconfigurable mapping: active cards per
    // router after packing inactive endpoints, floor rule.
    std::vector<int> endpoints(net.node_count(), 0);
    std::vector<int> inactive(net.node_count(), 0);
    for (const Link& l : net.links()) {
      for (PortId p : l.ports) {
        for (NodeId r : {l.u, l.v}) {
          ++endpoints[r];
          if (!plan.is_port_active(p) &&
              net.port(p).role == PortRole::backbone) {
            ++inactive[r];
          }
        }
      }
    }
    double cost = 0.0;
    for (NodeId r = 0; r < net.node_count(); ++r) {
      const int total_cards = (endpoints[r] + slots - 1) / slots;
      const int off = inactive[r] / slots;
      cost += card_energy * (total_cards - off);
    }
    cost += port_energy * ports_on;
    return cost;
  };

  // Odometer over per-link counts; objectives sorted ascending, so the
  // first routable candidate is provably optimal.
  while (true) {
    candidates.push_back({objective_of(plan_for(counts)), counts});
    int i = 0;
    while (i < static_cast<int>(counts.size()) &&
           counts[i] == static_cast<int>(backbone[i].size())) {
      counts[i] = 0;
      ++i;
    }
    if (i == static_cast<int>(counts.size())) break;
    ++counts[i];
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidatePlan& a, const CandidatePlan& b) {
              if (a.objective != b.objective) return a.objective < b.objective;
              return a.counts < b.counts;
            });

  // Routing program under fixed capacities, full column set, minimizing
  // total (scaled) traffic so ties between optimal activations resolve
  // toward the least-loaded routing.
  const auto solve_routing = [&](const ActivationPlan& plan) {
    lp::Model feas;
    std::vector<int> drow(demands.size());
    for (size_t d = 0; d < demands.size(); ++d) {
      drow[d] = feas.add_constraint("d" + std::to_string(d), {},
                                    lp::RowSense::eq, 1.0);
    }
    std::vector<int> arow(net.arcs().size());
    for (const Arc& a : net.arcs()) {
      const double cap_full = net.arc_capacity(a.id);
      const double cap_active = net.arc_capacity(a.id, plan);
      arow[a.id] = feas.add_constraint("a" + std::to_string(a.id), {},
                                       lp::RowSense::le,
                                       cap_active / cap_full);
    }
    for (size_t d = 0; d < demands.size(); ++d) {
      const NodeId u = demands[d].src;
      const NodeId v = demands[d].dst;
      for (NodeId w = 0; w < net.node_count(); ++w) {
        if (w == u) continue;
        if (!table.reachable(u, w) || !table.reachable(w, v)) continue;
        std::vector<std::pair<int, double>> terms{{drow[d], 1.0}};
        double cost = 0.0;
        for_each_two_segment_arc(table, u, v, w, [&](ArcId a, double g) {
          const double coef = demands[d].volume * g /
                              (params.theta * net.arc_capacity(a));
          terms.push_back({arow[a], coef});
          cost += coef;
        });
        feas.add_column("x" + std::to_string(d) + "_" + std::to_string(w),
                        0.0, 1.0, lp::VarKind::continuous, cost, terms);
      }
    }
    return lp::solve(feas, params.solver_limits);
  };
  const auto splits_from = [&](const lp::Solution& sol) {
    SplitPlan splits(demands.size());
    int var = 0;
    for (size_t d = 0; d < demands.size(); ++d) {
      splits[d].src = demands[d].src;
      splits[d].dst = demands[d].dst;
      for (NodeId w = 0; w < net.node_count(); ++w) {
        if (w == demands[d].src) continue;
        if (!table.reachable(demands[d].src, w) ||
            !table.reachable(w, demands[d].dst)) {
          continue;
        }
        const double x = sol.values[var++];
        if (x > 1e-9) splits[d].via.push_back({w, x});
      }
      double sum = 0.0;
      for (auto& [w, frac] : splits[d].via) sum += frac;
      for (auto& [w, frac] : splits[d].via) frac /= sum;
      double resum = 0.0;
      for (auto& [w, frac] : splits[d].via) resum += frac;
      splits[d].via.front().second += 1.0 - resum;
    }
    return splits;
  };

  bool found = false;
  double best_objective = 0.0;
  double best_load = 0.0;
  ActivationPlan best_plan;
  lp::Solution best_sol;
  for (const CandidatePlan& cand : candidates) {
    if (found && cand.objective > best_objective + 1e-9) break;
    const ActivationPlan plan = plan_for(cand.counts);
    lp::Solution sol = solve_routing(plan);
    if (sol.status != lp::SolveStatus::optimal) continue;
    if (!found || sol.objective < best_load - 1e-9) {
      found = true;
      best_objective = cand.objective;
      best_load = sol.objective;
      best_plan = plan;
      best_sol = std::move(sol);
    }
  }
  if (!found) {
    cfg.solver_status = lp::SolveStatus::infeasible;
    cfg.feasible = false;
    cfg.warnings.push_back("no activation admits a routing within theta");
    return cfg;
  }
  cfg.splits = splits_from(best_sol);
  cfg.plan = std::move(best_plan);
  cfg.lp_objective = best_objective;
  finalize_config(net, table, matrix, params, cfg, /*enforce_theta=*/true);
  cfg.solver_status = lp::SolveStatus::optimal;
  return cfg;
}

}  // namespace greensr
