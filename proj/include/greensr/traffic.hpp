#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "greensr/network.hpp"

namespace greensr {

/// Demand volumes t_uv for ordered router pairs, same units as port
/// capacities. Zero entries are permitted and skipped by the optimizer.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  explicit TrafficMatrix(int node_count)
      : n_(node_count), t_(static_cast<size_t>(node_count) * node_count, 0.0) {}

  int node_count() const { return n_; }
  double at(NodeId u, NodeId v) const { return t_.at(index(u, v)); }
  void set(NodeId u, NodeId v, double volume);
  void add(NodeId u, NodeId v, double volume);

  struct Demand {
    NodeId src;
    NodeId dst;
    double volume;
  };
  /// Nonzero demands, ordered by (src, dst).
  std::vector<Demand> nonzero() const;
  double total_volume() const;

 private:
  size_t index(NodeId u, NodeId v) const;
  int n_ = 0;
  std::vector<double> t_;
};

TrafficMatrix scale_matrix(const TrafficMatrix& m, double factor);

/// Total-traffic samples over several days on a uniform slot grid
/// (quarter-hour resolution: 96 slots per day).
class TrafficTimeSeries {
 public:
  TrafficTimeSeries(int slots_per_day, int days)
      : slots_(slots_per_day), days_(days),
        values_(static_cast<size_t>(slots_per_day) * days, nan_) {}

  int slots_per_day() const { return slots_; }
  int days() const { return days_; }
  void set(int day, int slot, double total);
  double at(int day, int slot) const;
  bool complete() const;  // every (day, slot) filled

  static TrafficTimeSeries read_csv(std::istream& in);
  void write_csv(std::ostream& out) const;

 private:
  static constexpr double nan_ = -1.0;  // totals are nonnegative
  int slots_;
  int days_;
  std::vector<double> values_;
};

struct DailyProfile {
  int slots_per_day = 0;
  double confidence = 0.0;           // two-sided level gamma
  std::vector<double> mean;          // mu(t)
  std::vector<double> deviation;     // sigma(t), 1/n estimator
  std::vector<double> lower;         // mu - z*sigma
  std::vector<double> upper;         // mu + z*sigma
  double max_mean() const;
};

/// Per-slot empirical mean and deviation (biased 1/n variance) plus a
/// symmetric two-sided confidence band; the band's upper edge is the
/// one-sided (1+gamma)/2 Gaussian quantile.
DailyProfile fit_profile(const TrafficTimeSeries& series, double confidence);

struct SlotWindow {
  int start = 0;   // first slot
  int length = 0;  // number of slots, may wrap past the last slot
  bool empty() const { return length == 0; }
  int end() const { return start + length - 1; }  // may exceed slots/day
};

/// Longest contiguous run of slots (wrap-around aware) whose upper
/// confidence bound stays at or below fraction * max_t mu(t). Empty window
/// when no slot qualifies; earliest start wins ties.
SlotWindow detect_low_load(const DailyProfile& profile, double fraction);

/// Phi^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

}  // namespace greensr
