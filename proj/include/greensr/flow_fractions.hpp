#pragma once

#include <utility>
#include <vector>

#include "greensr/network.hpp"
#include "greensr/traffic.hpp"

namespace greensr {

enum class EcmpMode {
  even_split,   // flow splits equally over shortest-path out-arcs per node
  single_path,  // smallest next-hop node id carries the whole unit
};

/// Per-(source, target) shortest-path arc fractions f_uw(a) under the
/// network's IGP weights. Stored sparsely: only arcs on some shortest
/// u->w path appear.
class FlowFractionTable {
 public:
  struct Entry {
    ArcId arc;
    double fraction;
  };

  int node_count() const { return nodes_; }
  int arc_count() const { return arcs_; }
  EcmpMode mode() const { return mode_; }

  /// Entries for the (u, w) unit flow, sorted by arc id. Empty when u == w
  /// or w is unreachable from u.
  const Entry* begin(NodeId u, NodeId w) const;
  const Entry* end(NodeId u, NodeId w) const;
  double fraction(NodeId u, NodeId w, ArcId a) const;

  bool reachable(NodeId u, NodeId w) const;
  /// Ordered pairs (u, w), u != w, with no path; empty on connected graphs.
  const std::vector<std::pair<NodeId, NodeId>>& unreachable_pairs() const {
    return unreachable_;
  }

 private:
  friend FlowFractionTable compute_flow_fractions(const Network&, EcmpMode);
  size_t pair_index(NodeId u, NodeId w) const;
  int nodes_ = 0;
  int arcs_ = 0;
  EcmpMode mode_ = EcmpMode::even_split;
  std::vector<Entry> pool_;
  std::vector<std::pair<int, int>> spans_;  // per (u,w): [begin, end) in pool_
  std::vector<char> reach_;
  std::vector<std::pair<NodeId, NodeId>> unreachable_;
};

FlowFractionTable compute_flow_fractions(const Network& net,
                                         EcmpMode mode = EcmpMode::even_split);

/// g^w_uv(a) = f_uw(a) + f_wv(a): the per-arc share of one traffic unit
/// routed u->v through intermediate w. w == v degenerates to the plain
/// shortest path. May exceed 1 when the two halves overlap on an arc.
double two_segment_fraction(const FlowFractionTable& table, NodeId u, NodeId v,
                            NodeId w, ArcId a);

/// Visits the merged sparse support of g^w_uv once per arc.
template <typename Fn>
void for_each_two_segment_arc(const FlowFractionTable& table, NodeId u,
                              NodeId v, NodeId w, Fn&& fn) {
  const auto* i = table.begin(u, w);
  const auto* ie = table.end(u, w);
  const auto* j = table.begin(w, v);
  const auto* je = table.end(w, v);
  while (i != ie || j != je) {
    if (j == je || (i != ie && i->arc < j->arc)) {
      fn(i->arc, i->fraction);
      ++i;
    } else if (i == ie || j->arc < i->arc) {
      fn(j->arc, j->fraction);
      ++j;
    } else {
      fn(i->arc, i->fraction + j->fraction);
      ++i;
      ++j;
    }
  }
}

/// Splitting fractions x^w_uv of one demand; only nonzero intermediates
/// are listed and they must sum to 1 (tolerance 1e-9).
struct DemandSplit {
  NodeId src = -1;
  NodeId dst = -1;
  std::vector<std::pair<NodeId, double>> via;  // (w, fraction)
};
using SplitPlan = std::vector<DemandSplit>;

/// tr(a) for every arc under the given demands and splitting fractions.
/// Every nonzero demand must have a split whose fractions sum to 1.
std::vector<double> arc_traffic(const FlowFractionTable& table,
                                const TrafficMatrix& matrix,
                                const SplitPlan& splits);

/// The identity routing: x concentrated on w = v for every nonzero demand.
SplitPlan spr_splits(const TrafficMatrix& matrix);

}  // namespace greensr
