#pragma once

#include <iosfwd>
#include <string>

namespace greensr {

/// Everything the command-line workflows need. Paper-preparation defaults:
/// 4 ports per link, 8 port-endpoints per linecard, theta 0.7, traffic
/// scale applied to the demand file before optimization.
struct RunConfig {
  std::string graph_path;
  std::string demands_path;
  std::string traffic_path;
  std::string config_path;
  std::string instance_name;  // default: graph file basename

  double theta = 0.7;
  double traffic_scale = 1.0;
  int ports_per_link = 4;
  double port_capacity = 0.0;  // 0: link bandwidth / ports_per_link
  int ports_per_linecard = 8;
  std::string mode = "2srg";  // 2srg | 2srg-ns
  std::string ecmp = "even-split";  // even-split | single-path
  double linecard_share = 0.8;
  double time_limit_sec = 3600.0;
  int max_demand_rows = 0;
  bool refine = true;
  bool accept_asymmetric_bandwidth = false;

  double confidence = 0.7;  // analyze
  double fraction = 0.5;

  std::string out_json;
  std::string out_csv;
  std::string out_config;
  std::string out_lp;  // explicit model export for external cross-checks

  // generate
  std::string generate_kind = "topology";  // topology | traffic
  std::string out_graph;
  std::string out_demands;
  std::string out_traffic;
  std::string gen_name = "synthetic";
  int gen_nodes = 20;
  int gen_edges = 40;
  unsigned seed = 1;
  double gen_spr_mlu = 0.9;
  double gen_bandwidth = 40000.0;
  int gen_days = 7;
  int gen_slots = 96;
  double gen_base = 100.0;
  double gen_amplitude = 0.9;
  double gen_noise = 0.0;
  double gen_phase = 3.6652;  // puts the daily minimum near 04:30
};

/// Dispatches one subcommand: optimize | baseline | analyze | evaluate |
/// compare | generate. Writes a deterministic JSON document to `out`;
/// failures print a machine-readable error object and return nonzero.
int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& out, std::ostream& err);

}  // namespace greensr
