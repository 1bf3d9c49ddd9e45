#include "greensr/report.hpp"

#include <sstream>
#include <stdexcept>

namespace greensr {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

RunReport make_report(const std::string& instance, const std::string& mode,
                      const SrConfiguration& cfg) {
  RunReport r;
  r.instance = instance;
  r.mode = mode;
  r.theta = cfg.theta;
  r.ports_total = cfg.ports_total;
  r.ports_inactive = cfg.ports_inactive;
  r.linecards_total = cfg.linecards_total;
  r.linecards_inactive = cfg.linecards_inactive;
  r.mlu = cfg.mlu;
  r.energy_saving = cfg.energy_saving;
  r.status = to_string(cfg.solver_status);
  r.downsampled_demands = cfg.downsampled_demands;
  r.warnings = cfg.warnings;
  return r;
}

OrderedJson report_to_json(const RunReport& r) {
  OrderedJson j;
  j["instance"] = r.instance;
  j["mode"] = r.mode;
  j["theta"] = r.theta;
  j["ports_total"] = r.ports_total;
  j["ports_inactive"] = r.ports_inactive;
  j["linecards_total"] = r.linecards_total;
  j["linecards_inactive"] = r.linecards_inactive;
  j["mlu"] = r.mlu;
  j["energy_saving"] = r.energy_saving;
  j["status"] = r.status;
  if (r.downsampled_demands > 0) {
    j["downsampled_demands"] = r.downsampled_demands;
  }
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

std::string report_csv_header() {
  return "instance,mode,theta,ports_total,ports_inactive,linecards_total,"
         "linecards_inactive,mlu,energy_saving";
}

std::string report_csv_row(const RunReport& r) {
  std::ostringstream out;
  out << r.instance << ',' << r.mode << ',' << format_double(r.theta) << ','
      << r.ports_total << ',' << r.ports_inactive << ',' << r.linecards_total
      << ',' << r.linecards_inactive << ',' << format_double(r.mlu) << ','
      << format_double(r.energy_saving);
  return out.str();
}

OrderedJson config_to_json(const Network& net, const SrConfiguration& cfg) {
  OrderedJson j;
  j["schema_version"] = 1;
  j["mode"] = to_string(cfg.mode);
  j["theta"] = cfg.theta;
  OrderedJson splits = OrderedJson::array();
  for (const DemandSplit& s : cfg.splits) {
    OrderedJson row;
    row["src"] = net.node_name(s.src);
    row["dst"] = net.node_name(s.dst);
    OrderedJson via = OrderedJson::array();
    for (const auto& [w, frac] : s.via) {
      via.push_back({{"via", net.node_name(w)}, {"fraction", frac}});
    }
    row["parts"] = std::move(via);
    splits.push_back(std::move(row));
  }
  j["splits"] = std::move(splits);
  OrderedJson inactive_ports = OrderedJson::array();
  for (PortId p = 0; p < static_cast<PortId>(cfg.plan.port_active.size());
       ++p) {
    if (!cfg.plan.is_port_active(p)) inactive_ports.push_back(p);
  }
  j["inactive_ports"] = std::move(inactive_ports);
  OrderedJson inactive_cards = OrderedJson::array();
  for (CardId c = 0; c < static_cast<CardId>(cfg.plan.card_active.size());
       ++c) {
    if (!cfg.plan.is_card_active(c)) inactive_cards.push_back(c);
  }
  j["inactive_linecards"] = std::move(inactive_cards);
  if (!cfg.plan.remap_card_at_u.empty()) {
    j["remap_card_at_u"] = cfg.plan.remap_card_at_u;
    j["remap_card_at_v"] = cfg.plan.remap_card_at_v;
  }
  j["mlu"] = cfg.mlu;
  j["energy_saving"] = cfg.energy_saving;
  j["status"] = to_string(cfg.solver_status);
  return j;
}

SrConfiguration config_from_json(const Network& net, const OrderedJson& doc) {
  if (!doc.contains("schema_version") || doc["schema_version"] != 1) {
    throw std::runtime_error("unsupported configuration schema version");
  }
  SrConfiguration cfg;
  cfg.mode = doc["mode"] == "no-splitting" ? SrMode::no_splitting
                                           : SrMode::splitting;
  cfg.theta = doc["theta"].get<double>();
  for (const auto& row : doc["splits"]) {
    DemandSplit s;
    s.src = net.node_by_name(row["src"].get<std::string>());
    s.dst = net.node_by_name(row["dst"].get<std::string>());
    if (s.src < 0 || s.dst < 0) {
      throw std::runtime_error("configuration references unknown node");
    }
    for (const auto& part : row["parts"]) {
      const NodeId w = net.node_by_name(part["via"].get<std::string>());
      if (w < 0) {
        throw std::runtime_error("configuration references unknown node");
      }
      s.via.push_back({w, part["fraction"].get<double>()});
    }
    cfg.splits.push_back(std::move(s));
  }
  cfg.plan = ActivationPlan::all_active(net);
  for (const auto& p : doc["inactive_ports"]) {
    cfg.plan.port_active.at(p.get<int>()) = 0;
  }
  for (const auto& c : doc["inactive_linecards"]) {
    cfg.plan.card_active.at(c.get<int>()) = 0;
  }
  if (doc.contains("remap_card_at_u")) {
    cfg.plan.remap_card_at_u =
        doc["remap_card_at_u"].get<std::vector<CardId>>();
    cfg.plan.remap_card_at_v =
        doc["remap_card_at_v"].get<std::vector<CardId>>();
  }
  cfg.mlu = doc["mlu"].get<double>();
  cfg.energy_saving = doc.value("energy_saving", 0.0);
  cfg.feasible = true;
  return cfg;
}

}  // namespace greensr
