#include "greensr/flow_fractions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace greensr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack for "arc lies on a shortest path" under floating-point weights.
constexpr double kDistEps = 1e-9;
}  // namespace

size_t FlowFractionTable::pair_index(NodeId u, NodeId w) const {
  if (u < 0 || w < 0 || u >= nodes_ || w >= nodes_) {
    throw std::out_of_range("node pair outside fraction table");
  }
  return static_cast<size_t>(u) * nodes_ + w;
}

const FlowFractionTable::Entry* FlowFractionTable::begin(NodeId u,
                                                         NodeId w) const {
  return pool_.data() + spans_[pair_index(u, w)].first;
}

const FlowFractionTable::Entry* FlowFractionTable::end(NodeId u,
                                                       NodeId w) const {
  return pool_.data() + spans_[pair_index(u, w)].second;
}

double FlowFractionTable::fraction(NodeId u, NodeId w, ArcId a) const {
  const Entry* lo = begin(u, w);
  const Entry* hi = end(u, w);
  const Entry* it = std::lower_bound(
      lo, hi, a, [](const Entry& e, ArcId arc) { return e.arc < arc; });
  if (it != hi && it->arc == a) return it->fraction;
  return 0.0;
}

bool FlowFractionTable::reachable(NodeId u, NodeId w) const {
  return reach_[pair_index(u, w)] != 0;
}

FlowFractionTable compute_flow_fractions(const Network& net, EcmpMode mode) {
  for (const Arc& a : net.arcs()) {
    if (!(a.igp_weight > 0.0)) {
      throw std::invalid_argument("IGP weights must be strictly positive");
    }
  }
  const int n = net.node_count();
  FlowFractionTable table;
  table.nodes_ = n;
  table.arcs_ = static_cast<int>(net.arcs().size());
  table.mode_ = mode;
  table.spans_.assign(static_cast<size_t>(n) * n, {0, 0});
  table.reach_.assign(static_cast<size_t>(n) * n, 0);

  std::vector<double> dist(n);
  std::vector<std::vector<ArcId>> dag_out(n);  // per node, toward target w
  std::vector<int> order(n);                   // nodes by descending dist
  std::vector<double> inflow(n);
  std::vector<std::pair<ArcId, double>> acc;

  for (NodeId w = 0; w < n; ++w) {
    // Reverse Dijkstra: dist[x] = shortest x -> w distance.
    std::fill(dist.begin(), dist.end(), kInf);
    dist[w] = 0.0;
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0.0, w});
    while (!heap.empty()) {
      auto [d, x] = heap.top();
      heap.pop();
      if (d > dist[x] + kDistEps) continue;
      for (ArcId a : net.in_arcs(x)) {
        const Arc& arc = net.arc(a);
        const double nd = d + arc.igp_weight;
        if (nd + kDistEps < dist[arc.from]) {
          dist[arc.from] = nd;
          heap.push({nd, arc.from});
        }
      }
    }

    for (NodeId x = 0; x < n; ++x) {
      dag_out[x].clear();
      if (dist[x] == kInf || x == w) continue;
      for (ArcId a : net.out_arcs(x)) {
        const Arc& arc = net.arc(a);
        if (dist[arc.to] == kInf) continue;
        if (std::abs(arc.igp_weight + dist[arc.to] - dist[x]) <= kDistEps) {
          dag_out[x].push_back(a);
        }
      }
      std::sort(dag_out[x].begin(), dag_out[x].end());
    }

    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return dist[a] > dist[b]; });

    for (NodeId u = 0; u < n; ++u) {
      const size_t idx = static_cast<size_t>(u) * n + w;
      if (u == w) {
        table.reach_[idx] = 1;  // f_uu is identically zero
        continue;
      }
      if (dist[u] == kInf) {
        table.unreachable_.push_back({u, w});
        continue;
      }
      table.reach_[idx] = 1;
      acc.clear();
      const int pool_begin = static_cast<int>(table.pool_.size());
      if (mode == EcmpMode::single_path) {
        NodeId x = u;
        while (x != w) {
          // Deterministic tie-break: smallest next-hop node id, then
          // smallest arc id among parallel arcs.
          ArcId best = -1;
          for (ArcId a : dag_out[x]) {
            if (best < 0 || net.arc(a).to < net.arc(best).to) best = a;
          }
          acc.push_back({best, 1.0});
          x = net.arc(best).to;
        }
      } else {
        std::fill(inflow.begin(), inflow.end(), 0.0);
        inflow[u] = 1.0;
        for (NodeId x : order) {
          if (x == w || inflow[x] <= 0.0 || dist[x] > dist[u] + kDistEps) {
            continue;
          }
          const double share = inflow[x] / dag_out[x].size();
          for (ArcId a : dag_out[x]) {
            acc.push_back({a, share});
            inflow[net.arc(a).to] += share;
          }
        }
      }
      std::sort(acc.begin(), acc.end());
      for (const auto& [arc, frac] : acc) {
        table.pool_.push_back({arc, frac});
      }
      table.spans_[idx] = {pool_begin, static_cast<int>(table.pool_.size())};
    }
  }
  return table;
}

double two_segment_fraction(const FlowFractionTable& table, NodeId u, NodeId v,
                            NodeId w, ArcId a) {
  if (u == v) throw std::invalid_argument("two-segment pair with u == v");
  if (w == u) throw std::invalid_argument("intermediate w must differ from u");
  return table.fraction(u, w, a) + table.fraction(w, v, a);
}

std::vector<double> arc_traffic(const FlowFractionTable& table,
                                const TrafficMatrix& matrix,
                                const SplitPlan& splits) {
  std::vector<double> load(table.arc_count(), 0.0);
  std::vector<const DemandSplit*> by_pair(
      static_cast<size_t>(table.node_count()) * table.node_count(), nullptr);
  for (const DemandSplit& s : splits) {
    by_pair.at(static_cast<size_t>(s.src) * table.node_count() + s.dst) = &s;
  }
  for (const auto& d : matrix.nonzero()) {
    const DemandSplit* split =
        by_pair[static_cast<size_t>(d.src) * table.node_count() + d.dst];
    const std::string name = std::to_string(d.src) + "->" +
                             std::to_string(d.dst);
    if (split == nullptr) {
      throw std::invalid_argument("no splitting fractions for demand " + name);
    }
    double sum = 0.0;
    for (const auto& [w, frac] : split->via) {
      if (frac < -1e-12) {
        throw std::invalid_argument("negative fraction for demand " + name);
      }
      sum += frac;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("fractions of demand " + name +
                                  " sum to " + std::to_string(sum));
    }
    for (const auto& [w, frac] : split->via) {
      if (frac <= 0.0) continue;
      const double scale = d.volume * frac;
      for_each_two_segment_arc(table, d.src, d.dst, w,
                               [&](ArcId a, double g) { load[a] += scale * g; });
    }
  }
  return load;
}

SplitPlan spr_splits(const TrafficMatrix& matrix) {
  SplitPlan plan;
  for (const auto& d : matrix.nonzero()) {
    plan.push_back({d.src, d.dst, {{d.dst, 1.0}}});
  }
  return plan;
}

}  // namespace greensr
