#include "greensr/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace greensr {

size_t TrafficMatrix::index(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw std::out_of_range("demand pair outside matrix");
  }
  return static_cast<size_t>(u) * n_ + v;
}

void TrafficMatrix::set(NodeId u, NodeId v, double volume) {
  if (volume < 0.0) throw std::invalid_argument("negative demand volume");
  if (u == v && volume > 0.0) {
    throw std::invalid_argument("self-demand " + std::to_string(u) + "->" +
                                std::to_string(v));
  }
  t_[index(u, v)] = volume;
}

void TrafficMatrix::add(NodeId u, NodeId v, double volume) {
  set(u, v, at(u, v) + volume);
}

std::vector<TrafficMatrix::Demand> TrafficMatrix::nonzero() const {
  std::vector<Demand> out;
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v = 0; v < n_; ++v) {
      const double t = t_[static_cast<size_t>(u) * n_ + v];
      if (t > 0.0) out.push_back({u, v, t});
    }
  }
  return out;
}

double TrafficMatrix::total_volume() const {
  double sum = 0.0;
  for (double t : t_) sum += t;
  return sum;
}

TrafficMatrix scale_matrix(const TrafficMatrix& m, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  TrafficMatrix out(m.node_count());
  for (NodeId u = 0; u < m.node_count(); ++u) {
    for (NodeId v = 0; v < m.node_count(); ++v) {
      if (u != v) out.set(u, v, m.at(u, v) * factor);
    }
  }
  return out;
}

void TrafficTimeSeries::set(int day, int slot, double total) {
  if (day < 0 || day >= days_ || slot < 0 || slot >= slots_) {
    throw std::out_of_range("sample outside series grid");
  }
  if (total < 0.0) throw std::invalid_argument("negative traffic total");
  values_[static_cast<size_t>(day) * slots_ + slot] = total;
}

double TrafficTimeSeries::at(int day, int slot) const {
  if (day < 0 || day >= days_ || slot < 0 || slot >= slots_) {
    throw std::out_of_range("sample outside series grid");
  }
  return values_[static_cast<size_t>(day) * slots_ + slot];
}

bool TrafficTimeSeries::complete() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](double v) { return v < 0.0; });
}

TrafficTimeSeries TrafficTimeSeries::read_csv(std::istream& in) {
  struct Row {
    int day, slot;
    double total;
  };
  std::vector<Row> rows;
  int max_day = -1;
  int max_slot = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("day", 0) == 0) continue;  // header
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Row r{};
    if (!(ls >> r.day >> r.slot >> r.total)) {
      throw std::runtime_error("traffic csv: malformed row at line " +
                               std::to_string(lineno));
    }
    if (r.day < 0 || r.slot < 0 || r.total < 0.0) {
      throw std::runtime_error("traffic csv: negative field at line " +
                               std::to_string(lineno));
    }
    max_day = std::max(max_day, r.day);
    max_slot = std::max(max_slot, r.slot);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("traffic csv: no samples");
  TrafficTimeSeries series(max_slot + 1, max_day + 1);
  for (const Row& r : rows) series.set(r.day, r.slot, r.total);
  return series;
}

void TrafficTimeSeries::write_csv(std::ostream& out) const {
  out << "day,slot,total_traffic\n";
  std::ostringstream num;
  num.precision(12);
  for (int d = 0; d < days_; ++d) {
    for (int s = 0; s < slots_; ++s) {
      num.str("");
      num << at(d, s);
      out << d << ',' << s << ',' << num.str() << '\n';
    }
  }
}

double DailyProfile::max_mean() const {
  return mean.empty() ? 0.0 : *std::max_element(mean.begin(), mean.end());
}

DailyProfile fit_profile(const TrafficTimeSeries& series, double confidence) {
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  if (series.days() < 2) {
    throw std::invalid_argument("need at least 2 days per slot");
  }
  if (!series.complete()) {
    throw std::invalid_argument("series has missing slots");
  }
  const int slots = series.slots_per_day();
  const int n = series.days();
  DailyProfile prof;
  prof.slots_per_day = slots;
  prof.confidence = confidence;
  prof.mean.resize(slots);
  prof.deviation.resize(slots);
  prof.lower.resize(slots);
  prof.upper.resize(slots);
  const double z = normal_quantile(0.5 * (1.0 + confidence));
  for (int s = 0; s < slots; ++s) {
    double sum = 0.0;
    for (int d = 0; d < n; ++d) sum += series.at(d, s);
    const double mu = sum / n;
    double sq = 0.0;
    for (int d = 0; d < n; ++d) {
      const double dev = series.at(d, s) - mu;
      sq += dev * dev;
    }
    const double sigma = std::sqrt(sq / n);  // biased 1/n estimator
    prof.mean[s] = mu;
    prof.deviation[s] = sigma;
    prof.lower[s] = mu - z * sigma;
    prof.upper[s] = mu + z * sigma;
  }
  return prof;
}

SlotWindow detect_low_load(const DailyProfile& profile, double fraction) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw std::invalid_argument("fraction must lie in (0, 1)");
  }
  const int slots = profile.slots_per_day;
  const double threshold = fraction * profile.max_mean();
  std::vector<char> ok(slots);
  int qualifying = 0;
  for (int s = 0; s < slots; ++s) {
    ok[s] = profile.upper[s] <= threshold;
    qualifying += ok[s] ? 1 : 0;
  }
  if (qualifying == slots) return {0, slots};
  SlotWindow best;
  int run_start = -1;
  // Doubled scan covers runs that wrap past midnight.
  for (int i = 0; i < 2 * slots; ++i) {
    if (ok[i % slots]) {
      if (run_start < 0) run_start = i;
      const int len = std::min(i - run_start + 1, slots);
      if (len > best.length && run_start < slots) {
        best.start = run_start;
        best.length = len;
      }
    } else {
      run_start = -1;
    }
  }
  return best;
}

// Acklam's rational approximation refined by one Newton step through the
// erfc-based CDF; accurate to ~1e-15 over (0, 1).
double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("quantile probability must lie in (0, 1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  if (pdf > 0.0) x -= (cdf - p) / pdf;
  return x;
}

}  // namespace greensr
