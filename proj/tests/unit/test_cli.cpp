#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "greensr/report.hpp"
#include "greensr/run.hpp"
#include "support.hpp"

using namespace greensr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("greensr_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_small_instance(const TempDir& dir) {
  std::ofstream g(dir.file("tiny.graph"));
  g << "NODES 4\nlabel x y\nn0 0 0\nn1 1 0\nn2 0 1\nn3 1 1\n\n"
       "EDGES 5\nlabel src dest weight bw delay\n"
       "edge_0 0 1 1 400 1\n"
       "edge_1 1 3 1 400 1\n"
       "edge_2 0 2 1 400 1\n"
       "edge_3 2 3 1 400 1\n"
       "edge_4 0 3 3 400 1\n";
  std::ofstream d(dir.file("tiny.demands"));
  d << "DEMANDS 3\nlabel src dest bw\n"
       "demand_0 0 3 200\n"
       "demand_1 1 2 80\n"
       "demand_2 3 0 120\n";
}

std::string run_to_string(const std::string& command, const RunConfig& cfg,
                          int* rc = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(command, cfg, out, err);
  if (rc != nullptr) *rc = code;
  return out.str();
}

}  // namespace

TEST_CASE("optimize emits the report schema and a loadable configuration") {
  TempDir dir;
  write_small_instance(dir);
  RunConfig cfg;
  cfg.graph_path = dir.file("tiny.graph");
  cfg.demands_path = dir.file("tiny.demands");
  cfg.traffic_scale = 0.5;
  cfg.out_config = dir.file("config.json");
  cfg.out_csv = dir.file("row.csv");
  int rc = -1;
  const std::string text = run_to_string("optimize", cfg, &rc);
  REQUIRE(rc == 0);
  const OrderedJson j = OrderedJson::parse(text);
  for (const char* key :
       {"instance", "mode", "theta", "ports_total", "ports_inactive",
        "linecards_total", "linecards_inactive", "mlu", "energy_saving"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["instance"] == "tiny");
  CHECK(j["mode"] == "2srg");
  CHECK(j["mlu"].get<double>() <= 0.7 + 1e-6);

  std::ifstream csv(dir.file("row.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == report_csv_header());

  SUBCASE("evaluate on the stored configuration reproduces the MLU") {
    RunConfig ev = cfg;
    ev.config_path = dir.file("config.json");
    const std::string eval_text = run_to_string("evaluate", ev, &rc);
    REQUIRE(rc == 0);
    const OrderedJson ej = OrderedJson::parse(eval_text);
    CHECK(ej["mlu"].get<double>() ==
          doctest::Approx(j["mlu"].get<double>()).epsilon(1e-12));
    CHECK(ej["ports_inactive"] == j["ports_inactive"]);
  }
}

TEST_CASE("reports are byte-deterministic") {
  TempDir dir;
  write_small_instance(dir);
  RunConfig cfg;
  cfg.graph_path = dir.file("tiny.graph");
  cfg.demands_path = dir.file("tiny.demands");
  cfg.traffic_scale = 0.5;
  const std::string a = run_to_string("compare", cfg);
  const std::string b = run_to_string("compare", cfg);
  CHECK(a == b);
  CHECK(!a.empty());
}

TEST_CASE("compare tabulates all three methods") {
  TempDir dir;
  write_small_instance(dir);
  RunConfig cfg;
  cfg.graph_path = dir.file("tiny.graph");
  cfg.demands_path = dir.file("tiny.demands");
  cfg.traffic_scale = 0.5;
  cfg.out_csv = dir.file("cmp.csv");
  int rc = -1;
  const std::string text = run_to_string("compare", cfg, &rc);
  REQUIRE(rc == 0);
  const OrderedJson j = OrderedJson::parse(text);
  REQUIRE(j["methods"].size() == 3);
  CHECK(j["methods"][0]["mode"] == "spr");
  CHECK(j["methods"][1]["mode"] == "2srg");
  CHECK(j["methods"][2]["mode"] == "2srg-ns");
  // The optimizer never deactivates fewer ports than the baseline.
  CHECK(j["methods"][1]["ports_inactive"].get<int>() >=
        j["methods"][0]["ports_inactive"].get<int>());
}

TEST_CASE("analyze matches a hand scan of the synthetic series") {
  TempDir dir;
  RunConfig gen;
  gen.generate_kind = "traffic";
  gen.gen_slots = 96;
  gen.gen_days = 4;
  gen.gen_noise = 0.0;
  gen.out_traffic = dir.file("traffic.csv");
  int rc = -1;
  run_to_string("generate", gen, &rc);
  REQUIRE(rc == 0);

  RunConfig an;
  an.traffic_path = dir.file("traffic.csv");
  an.confidence = 0.7;
  an.fraction = 0.5;
  const std::string text = run_to_string("analyze", an, &rc);
  REQUIRE(rc == 0);
  const OrderedJson j = OrderedJson::parse(text);
  REQUIRE(!j["low_load_window"]["empty"].get<bool>());
  // sigma = 0: window is where 1 + 0.9 sin(2 pi t/96 + phase) <= 0.95.
  const int slots = 96;
  const double threshold = 0.5 * j["max_mean"].get<double>();
  std::ifstream csvin(dir.file("traffic.csv"));
  TrafficTimeSeries series = TrafficTimeSeries::read_csv(csvin);
  auto profile = fit_profile(series, 0.7);
  int best_start = 0, best_len = 0, run_start = -1;
  for (int i = 0; i < 2 * slots; ++i) {
    if (profile.upper[i % slots] <= threshold) {
      if (run_start < 0) run_start = i;
      const int len = std::min(i - run_start + 1, slots);
      if (len > best_len && run_start < slots) {
        best_len = len;
        best_start = run_start;
      }
    } else {
      run_start = -1;
    }
  }
  CHECK(j["low_load_window"]["start_slot"].get<int>() == best_start);
  CHECK(j["low_load_window"]["length"].get<int>() == best_len);
}

TEST_CASE("failures produce a machine-readable error object") {
  RunConfig cfg;
  cfg.graph_path = "/nonexistent/x.graph";
  cfg.demands_path = "/nonexistent/x.demands";
  int rc = -1;
  const std::string text = run_to_string("optimize", cfg, &rc);
  CHECK(rc != 0);
  const OrderedJson j = OrderedJson::parse(text);
  REQUIRE(j.contains("error"));
  CHECK(j["error"].contains("message"));

  cfg.theta = 1.5;
  const std::string text2 = run_to_string("optimize", cfg, &rc);
  CHECK(rc != 0);
  CHECK(OrderedJson::parse(text2).contains("error"));
}

TEST_CASE("configuration documents round-trip through json") {
  auto ex = testsupport::make_six_node_example();
  OptimizationParams params;
  const SrConfiguration cfg = optimize(ex.net, ex.demands, params);
  REQUIRE(cfg.feasible);
  const OrderedJson doc = config_to_json(ex.net, cfg);
  const SrConfiguration back = config_from_json(ex.net, doc);
  CHECK(back.theta == doctest::Approx(cfg.theta));
  REQUIRE(back.splits.size() == cfg.splits.size());
  CHECK(back.plan.port_active == cfg.plan.port_active);
  CHECK(back.plan.card_active == cfg.plan.card_active);
  CHECK(back.plan.remap_card_at_u == cfg.plan.remap_card_at_u);
  // Serializing again yields identical bytes.
  CHECK(config_to_json(ex.net, cfg).dump(2) == doc.dump(2));
}
