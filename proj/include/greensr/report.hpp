#pragma once

#include <string>

#include "json.hpp"

#include "greensr/optimizer.hpp"

namespace greensr {

using OrderedJson = nlohmann::ordered_json;

/// One result row: {instance, mode, theta, ports_total, ports_inactive,
/// linecards_total, linecards_inactive, mlu, energy_saving}, the same
/// fields the CSV export mirrors.
struct RunReport {
  std::string instance;
  std::string mode;  // "spr" | "2srg" | "2srg-ns"
  double theta = 0.7;
  int ports_total = 0;
  int ports_inactive = 0;
  int linecards_total = 0;
  int linecards_inactive = 0;
  double mlu = 0.0;
  double energy_saving = 0.0;

  std::string status;
  int downsampled_demands = 0;
  std::vector<std::string> warnings;
};

RunReport make_report(const std::string& instance, const std::string& mode,
                      const SrConfiguration& cfg);

OrderedJson report_to_json(const RunReport& r);
std::string report_csv_header();
std::string report_csv_row(const RunReport& r);

/// Configuration documents carry an explicit schema version; splits and
/// activation states round-trip exactly.
OrderedJson config_to_json(const Network& net, const SrConfiguration& cfg);
SrConfiguration config_from_json(const Network& net, const OrderedJson& doc);

std::string format_double(double v);

}  // namespace greensr
