#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "greensr/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Segment-routing energy optimizer: computes static 2-SR routing "
      "configurations that switch off backbone ports and linecards while "
      "keeping every link under a utilization threshold."};
  app.require_subcommand(1);

  greensr::RunConfig cfg;

  const auto add_instance_flags = [&](CLI::App* cmd) {
    cmd->add_option("--graph", cfg.graph_path, "topology file (.graph)")
        ->required();
    cmd->add_option("--demands", cfg.demands_path, "demand file (.demands)")
        ->required();
    cmd->add_option("--name", cfg.instance_name,
                    "instance label (default: graph basename)");
    cmd->add_option("--theta", cfg.theta, "link-utilization upper bound");
    cmd->add_option("--scale", cfg.traffic_scale,
                    "demand scale factor (0.5 mimics low-load preparation)");
    cmd->add_option("--ports-per-link", cfg.ports_per_link,
                    "parallel ports per link");
    cmd->add_option("--port-capacity", cfg.port_capacity,
                    "per-port capacity override (default bw/ports)");
    cmd->add_option("--ports-per-linecard", cfg.ports_per_linecard,
                    "endpoints per linecard");
    cmd->add_option("--linecard-share", cfg.linecard_share,
                    "linecard share of network energy");
    cmd->add_option("--ecmp", cfg.ecmp, "even-split | single-path");
    cmd->add_flag("--accept-asymmetric-bandwidth",
                  cfg.accept_asymmetric_bandwidth,
                  "pair asymmetric edges keeping the larger bandwidth");
    cmd->add_option("--out-json", cfg.out_json, "write the JSON report here");
    cmd->add_option("--out-csv", cfg.out_csv, "write the CSV rows here");
  };
  const auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", cfg.mode, "2srg | 2srg-ns");
    cmd->add_option("--time-limit", cfg.time_limit_sec,
                    "solver time limit in seconds");
    cmd->add_option("--max-demand-rows", cfg.max_demand_rows,
                    "keep only the K largest demands (0: all)");
    cmd->add_flag("--no-refine",
                  [&cfg](size_t) { cfg.refine = false; },
                  "skip the port-elimination refinement");
  };

  CLI::App* opt = app.add_subcommand(
      "optimize", "compute a port-minimizing 2-SR configuration");
  add_instance_flags(opt);
  add_solver_flags(opt);
  opt->add_option("--out-config", cfg.out_config,
                  "persist the configuration document here");
  opt->add_option("--out-lp", cfg.out_lp,
                  "export the explicit program in LP text format");

  CLI::App* base = app.add_subcommand(
      "baseline", "shortest-path routing with per-link port deactivation");
  add_instance_flags(base);
  base->add_option("--out-config", cfg.out_config,
                   "persist the configuration document here");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "fit the daily traffic profile and find the low-load window");
  analyze->add_option("--traffic", cfg.traffic_path, "day,slot,total csv")
      ->required();
  analyze->add_option("--confidence", cfg.confidence,
                      "two-sided confidence level");
  analyze->add_option("--fraction", cfg.fraction,
                      "low-load threshold as a fraction of the peak mean");
  analyze->add_option("--out-json", cfg.out_json, "write the JSON report here");
  analyze->add_option("--out-csv", cfg.out_csv, "write per-slot stats here");

  CLI::App* eval = app.add_subcommand(
      "evaluate", "recompute MLU and energy for a stored configuration");
  add_instance_flags(eval);
  eval->add_option("--config", cfg.config_path, "configuration document")
      ->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "tabulate spr, 2srg and 2srg-ns on one instance");
  add_instance_flags(compare);
  add_solver_flags(compare);

  CLI::App* gen = app.add_subcommand(
      "generate", "emit synthetic topology/demand or traffic files");
  gen->add_option("--kind", cfg.generate_kind, "topology | traffic");
  gen->add_option("--name", cfg.gen_name, "instance name prefix");
  gen->add_option("--nodes", cfg.gen_nodes, "node count");
  gen->add_option("--edges", cfg.gen_edges, "undirected link count");
  gen->add_option("--seed", cfg.seed, "random seed");
  gen->add_option("--spr-mlu", cfg.gen_spr_mlu,
                  "calibrated shortest-path MLU of the demands");
  gen->add_option("--bandwidth", cfg.gen_bandwidth, "per-link bandwidth");
  gen->add_option("--days", cfg.gen_days, "traffic: days");
  gen->add_option("--slots", cfg.gen_slots, "traffic: slots per day");
  gen->add_option("--base", cfg.gen_base, "traffic: base volume");
  gen->add_option("--amplitude", cfg.gen_amplitude, "traffic: diurnal swing");
  gen->add_option("--noise", cfg.gen_noise, "traffic: gaussian noise sigma");
  gen->add_option("--phase", cfg.gen_phase, "traffic: sinusoid phase");
  gen->add_option("--out-graph", cfg.out_graph, "topology output path");
  gen->add_option("--out-demands", cfg.out_demands, "demands output path");
  gen->add_option("--out-traffic", cfg.out_traffic, "traffic csv output path");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  return greensr::run_command(command, cfg, std::cout, std::cerr);
}
