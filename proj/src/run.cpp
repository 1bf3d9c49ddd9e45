#include "greensr/run.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "greensr/baseline.hpp"
#include "greensr/generator.hpp"
#include "greensr/optimizer.hpp"
#include "greensr/repetita.hpp"
#include "greensr/report.hpp"

namespace greensr {

namespace {

std::string basename_no_ext(const std::string& path) {
  const size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name.empty() ? "instance" : name;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.theta > 0.0) || cfg.theta > 1.0) {
    throw std::invalid_argument("theta must lie in (0, 1]");
  }
  if (!(cfg.traffic_scale > 0.0)) {
    throw std::invalid_argument("traffic scale must be positive");
  }
  if (cfg.ports_per_link <= 0 || cfg.ports_per_linecard <= 0) {
    throw std::invalid_argument("port parameters must be positive");
  }
  if (cfg.port_capacity < 0.0) {
    throw std::invalid_argument("port capacity must be nonnegative");
  }
  if (!(cfg.time_limit_sec > 0.0)) {
    throw std::invalid_argument("time limit must be positive");
  }
  if (cfg.mode != "2srg" && cfg.mode != "2srg-ns") {
    throw std::invalid_argument("mode must be 2srg or 2srg-ns");
  }
  if (cfg.ecmp != "even-split" && cfg.ecmp != "single-path") {
    throw std::invalid_argument("ecmp must be even-split or single-path");
  }
}

struct LoadedInstance {
  Network net;
  TrafficMatrix demands;
  std::string name;
};

LoadedInstance load_instance(const RunConfig& cfg) {
  if (cfg.graph_path.empty() || cfg.demands_path.empty()) {
    throw std::invalid_argument("graph and demands files are required");
  }
  auto [net, tm] = parse_repetita(cfg.graph_path, cfg.demands_path,
                                  cfg.ports_per_linecard,
                                  cfg.accept_asymmetric_bandwidth);
  Network expanded = expand_ports(net, cfg.ports_per_link, cfg.port_capacity,
                                  cfg.ports_per_linecard);
  TrafficMatrix scaled = scale_matrix(tm, cfg.traffic_scale);
  const std::string name = cfg.instance_name.empty()
                               ? basename_no_ext(cfg.graph_path)
                               : cfg.instance_name;
  return {std::move(expanded), std::move(scaled), name};
}

OptimizationParams params_from(const RunConfig& cfg) {
  OptimizationParams p;
  p.theta = cfg.theta;
  p.mode = cfg.mode == "2srg-ns" ? SrMode::no_splitting : SrMode::splitting;
  p.ecmp = cfg.ecmp == "single-path" ? EcmpMode::single_path
                                     : EcmpMode::even_split;
  p.solver_limits.time_limit_sec = cfg.time_limit_sec;
  p.ports_per_linecard = cfg.ports_per_linecard;
  p.linecard_energy_share = cfg.linecard_share;
  p.refine = cfg.refine;
  p.max_demand_rows = cfg.max_demand_rows;
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void emit_outputs(const RunConfig& cfg, const OrderedJson& json_doc,
                  const std::string& csv_doc, std::ostream& out) {
  out << json_doc.dump(2) << '\n';
  if (!cfg.out_json.empty()) write_file(cfg.out_json, json_doc.dump(2) + "\n");
  if (!cfg.out_csv.empty() && !csv_doc.empty()) write_file(cfg.out_csv, csv_doc);
}

std::string minutes_label(int slot, int slots_per_day) {
  const int minutes =
      static_cast<int>(std::lround(1440.0 * slot / slots_per_day)) % 1440;
  std::ostringstream out;
  out << minutes / 60 << ':' << (minutes % 60 < 10 ? "0" : "")
      << minutes % 60;
  return out.str();
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  LoadedInstance inst = load_instance(cfg);
  const OptimizationParams params = params_from(cfg);
  if (!cfg.out_lp.empty()) {
    const FlowFractionTable table = compute_flow_fractions(inst.net, params.ecmp);
    const lp::Model model =
        build_port_lp(inst.net, inst.demands, table, params);
    std::ostringstream text;
    model.write_lp(text);
    write_file(cfg.out_lp, text.str());
  }
  const SrConfiguration result = optimize(inst.net, inst.demands, params);
  const RunReport report = make_report(inst.name, cfg.mode, result);
  std::string csv = report_csv_header() + "\n" + report_csv_row(report) + "\n";
  emit_outputs(cfg, report_to_json(report), csv, out);
  if (!cfg.out_config.empty() && result.feasible) {
    write_file(cfg.out_config,
               config_to_json(inst.net, result).dump(2) + "\n");
  }
  return result.feasible ? 0 : 1;
}

int cmd_baseline(const RunConfig& cfg, std::ostream& out) {
  LoadedInstance inst = load_instance(cfg);
  const FlowFractionTable table = compute_flow_fractions(
      inst.net, cfg.ecmp == "single-path" ? EcmpMode::single_path
                                          : EcmpMode::even_split);
  SrConfiguration result =
      spr_baseline(inst.net, inst.demands, table, cfg.theta);
  const EnergyReport energy =
      energy_report(inst.net, result.plan, cfg.linecard_share);
  result.energy_saving = energy.saving;
  const RunReport report = make_report(inst.name, "spr", result);
  std::string csv = report_csv_header() + "\n" + report_csv_row(report) + "\n";
  emit_outputs(cfg, report_to_json(report), csv, out);
  if (!cfg.out_config.empty()) {
    write_file(cfg.out_config,
               config_to_json(inst.net, result).dump(2) + "\n");
  }
  return 0;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  if (cfg.traffic_path.empty()) {
    throw std::invalid_argument("analyze needs a traffic csv");
  }
  std::ifstream in(cfg.traffic_path);
  if (!in) throw std::runtime_error("cannot open " + cfg.traffic_path);
  const TrafficTimeSeries series = TrafficTimeSeries::read_csv(in);
  const DailyProfile profile = fit_profile(series, cfg.confidence);
  const SlotWindow window = detect_low_load(profile, cfg.fraction);

  OrderedJson j;
  j["traffic_file"] = cfg.traffic_path;
  j["slots_per_day"] = profile.slots_per_day;
  j["days"] = series.days();
  j["confidence"] = cfg.confidence;
  j["fraction"] = cfg.fraction;
  j["max_mean"] = profile.max_mean();
  j["threshold"] = cfg.fraction * profile.max_mean();
  OrderedJson w;
  w["empty"] = window.empty();
  if (!window.empty()) {
    w["start_slot"] = window.start;
    w["length"] = window.length;
    w["end_slot"] = (window.start + window.length - 1) % profile.slots_per_day;
    w["start_time"] = minutes_label(window.start, profile.slots_per_day);
    w["end_time"] = minutes_label(window.start + window.length,
                                  profile.slots_per_day);
  }
  j["low_load_window"] = std::move(w);

  std::ostringstream csv;
  csv << "slot,mean,deviation,lower,upper,below_threshold\n";
  const double threshold = cfg.fraction * profile.max_mean();
  for (int s = 0; s < profile.slots_per_day; ++s) {
    csv << s << ',' << format_double(profile.mean[s]) << ','
        << format_double(profile.deviation[s]) << ','
        << format_double(profile.lower[s]) << ','
        << format_double(profile.upper[s]) << ','
        << (profile.upper[s] <= threshold ? 1 : 0) << '\n';
  }
  emit_outputs(cfg, j, csv.str(), out);
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.config_path.empty()) {
    throw std::invalid_argument("evaluate needs a stored configuration");
  }
  LoadedInstance inst = load_instance(cfg);
  std::ifstream in(cfg.config_path);
  if (!in) throw std::runtime_error("cannot open " + cfg.config_path);
  OrderedJson doc = OrderedJson::parse(in);
  SrConfiguration cfg_doc = config_from_json(inst.net, doc);

  // The configuration routes exactly the demands it lists (a downsampled
  // run may have dropped small ones); evaluate against those and report
  // any volume the plan does not carry.
  TrafficMatrix routed(inst.net.node_count());
  for (const DemandSplit& s : cfg_doc.splits) {
    routed.set(s.src, s.dst, inst.demands.at(s.src, s.dst));
  }
  const double unrouted = inst.demands.total_volume() - routed.total_volume();
  if (unrouted > 1e-9) {
    cfg_doc.warnings.push_back(
        "configuration does not route " + format_double(unrouted) +
        " of demand volume (downsampled run)");
  }

  const FlowFractionTable table = compute_flow_fractions(
      inst.net, cfg.ecmp == "single-path" ? EcmpMode::single_path
                                          : EcmpMode::even_split);
  cfg_doc.arc_load = arc_traffic(table, routed, cfg_doc.splits);
  const MluReport mlu = evaluate_mlu(inst.net, cfg_doc.plan, cfg_doc.arc_load);
  cfg_doc.arc_utilization = mlu.utilization;
  cfg_doc.mlu = mlu.mlu;
  const EnergyReport energy =
      energy_report(inst.net, cfg_doc.plan, cfg.linecard_share);
  cfg_doc.ports_total = energy.ports_total;
  cfg_doc.ports_inactive = energy.ports_inactive;
  cfg_doc.linecards_total = energy.linecards_total;
  cfg_doc.linecards_inactive = energy.linecards_inactive;
  cfg_doc.energy_saving = energy.saving;

  const std::string mode_label =
      cfg_doc.mode == SrMode::no_splitting ? "2srg-ns" : "2srg";
  const RunReport report = make_report(inst.name, mode_label, cfg_doc);
  std::string csv = report_csv_header() + "\n" + report_csv_row(report) + "\n";
  emit_outputs(cfg, report_to_json(report), csv, out);
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  LoadedInstance inst = load_instance(cfg);
  const FlowFractionTable table = compute_flow_fractions(
      inst.net, cfg.ecmp == "single-path" ? EcmpMode::single_path
                                          : EcmpMode::even_split);

  SrConfiguration spr = spr_baseline(inst.net, inst.demands, table, cfg.theta);
  spr.energy_saving =
      energy_report(inst.net, spr.plan, cfg.linecard_share).saving;

  OptimizationParams params = params_from(cfg);
  params.mode = SrMode::splitting;
  const SrConfiguration split = optimize(inst.net, inst.demands, params);
  params.mode = SrMode::no_splitting;
  const SrConfiguration nosplit = optimize(inst.net, inst.demands, params);

  const RunReport rows[3] = {make_report(inst.name, "spr", spr),
                             make_report(inst.name, "2srg", split),
                             make_report(inst.name, "2srg-ns", nosplit)};
  OrderedJson j;
  j["instance"] = inst.name;
  j["theta"] = cfg.theta;
  OrderedJson arr = OrderedJson::array();
  std::ostringstream csv;
  csv << report_csv_header() << '\n';
  for (const RunReport& r : rows) {
    arr.push_back(report_to_json(r));
    csv << report_csv_row(r) << '\n';
  }
  j["methods"] = std::move(arr);
  emit_outputs(cfg, j, csv.str(), out);
  return split.feasible && nosplit.feasible ? 0 : 1;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  OrderedJson j;
  if (cfg.generate_kind == "topology") {
    if (cfg.out_graph.empty() || cfg.out_demands.empty()) {
      throw std::invalid_argument(
          "generate topology needs --out-graph and --out-demands");
    }
    TopologySpec spec;
    spec.name = cfg.gen_name;
    spec.nodes = cfg.gen_nodes;
    spec.edges = cfg.gen_edges;
    spec.seed = cfg.seed;
    spec.bandwidth = cfg.gen_bandwidth;
    spec.spr_mlu = cfg.gen_spr_mlu;
    const GeneratedInstance inst = generate_topology_instance(spec);
    std::ostringstream graph, demands;
    write_graph(graph, inst.graph);
    write_demands(demands, inst.demands);
    write_file(cfg.out_graph, graph.str());
    write_file(cfg.out_demands, demands.str());
    j["generated"] = "topology";
    j["name"] = spec.name;
    j["nodes"] = spec.nodes;
    j["edges"] = static_cast<int>(inst.graph.edges.size());
    j["demands"] = static_cast<int>(inst.demands.size());
    j["seed"] = spec.seed;
    j["graph_file"] = cfg.out_graph;
    j["demands_file"] = cfg.out_demands;
  } else if (cfg.generate_kind == "traffic") {
    if (cfg.out_traffic.empty()) {
      throw std::invalid_argument("generate traffic needs --out-traffic");
    }
    const TrafficTimeSeries series = generate_traffic_series(
        cfg.gen_slots, cfg.gen_days, cfg.gen_base, cfg.gen_amplitude,
        cfg.gen_noise, cfg.gen_phase, cfg.seed);
    std::ostringstream csv;
    series.write_csv(csv);
    write_file(cfg.out_traffic, csv.str());
    j["generated"] = "traffic";
    j["slots_per_day"] = cfg.gen_slots;
    j["days"] = cfg.gen_days;
    j["seed"] = cfg.seed;
    j["traffic_file"] = cfg.out_traffic;
  } else {
    throw std::invalid_argument("generate kind must be topology or traffic");
  }
  out << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (command == "optimize") return cmd_optimize(cfg, out);
    if (command == "baseline") return cmd_baseline(cfg, out);
    if (command == "analyze") return cmd_analyze(cfg, out);
    if (command == "evaluate") return cmd_evaluate(cfg, out);
    if (command == "compare") return cmd_compare(cfg, out);
    if (command == "generate") return cmd_generate(cfg, out);
    throw std::invalid_argument("unknown command: " + command);
  } catch (const std::exception& e) {
    OrderedJson j;
    j["error"] = {{"command", command}, {"message", e.what()}};
    out << j.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace greensr
