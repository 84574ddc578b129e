/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/Explorer.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "hiernet/Errors.hh"

namespace hiernet {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + (where.empty() ? "/" : where) + ": " +
                    what);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

// "" (document root) joins as "/key", nested paths as "where.key".
std::string subfield(const std::string& where, const std::string& key) {
  return where.empty() ? "/" + key : where + "." + key;
}

// Unknown keys are typos until proven otherwise.
void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool found = false;
    for (const char* k : known)
      if (item.key() == k) {
        found = true;
        break;
      }
    if (!found) fail(subfield(where, item.key()), "unknown field");
  }
}

const json& require(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(subfield(where, key), "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

BlockKind parse_block_kind(const std::string& s, const std::string& where) {
  if (s == "Ring") return BlockKind::Ring;
  if (s == "FC" || s == "FullyConnected") return BlockKind::FullyConnected;
  if (s == "Switch") return BlockKind::Switch;
  fail(where, "unknown block kind '" + s + "'");
}

Topology parse_topology_json(const json& v, const std::string& where,
                             int max_dims) {
  try {
    if (v.is_string()) return parse_topology(v.get<std::string>(), max_dims);
    if (v.is_array()) {
      std::vector<DimBlock> dims;
      for (size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        expect_object(v[i], w);
        reject_unknown(v[i], w, {"kind", "size"});
        DimBlock d;
        d.kind = parse_block_kind(as_string(require(v[i], w, "kind"), w + ".kind"),
                                  w + ".kind");
        d.size = as_int(require(v[i], w, "size"), w + ".size");
        dims.push_back(d);
      }
      return Topology(std::move(dims), max_dims);
    }
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  fail(where, "expected a topology string or a list of {kind, size} records");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json list_or_null(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return v;
}

json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

Workload parse_workload_json(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where,
                 {"name", "params", "mp_size", "dp_size", "bytes_per_param",
                  "mp_comm_bytes", "dp_comm_bytes", "compute_time"});
  Workload w;
  w.name = as_string(require(j, where, "name"), subfield(where, "name"));
  w.params = as_number(require(j, where, "params"), subfield(where, "params"));
  w.mp_size = as_int(require(j, where, "mp_size"), subfield(where, "mp_size"));
  w.dp_size = as_int(require(j, where, "dp_size"), subfield(where, "dp_size"));
  w.compute_time = as_number(require(j, where, "compute_time"),
                             subfield(where, "compute_time"));
  if (auto it = j.find("bytes_per_param"); it != j.end())
    w.bytes_per_param = as_number(*it, subfield(where, "bytes_per_param"));
  if (auto it = j.find("mp_comm_bytes"); it != j.end())
    w.mp_comm_bytes = as_number(*it, subfield(where, "mp_comm_bytes"));
  if (auto it = j.find("dp_comm_bytes"); it != j.end())
    w.dp_comm_bytes = as_number(*it, subfield(where, "dp_comm_bytes"));
  try {
    w.validate();
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return w;
}

Workload load_workload_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("workload file " + path + ": " + e.what());
  }
  return parse_workload_json(j, "");
}

SweepConfig parse_sweep_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  expect_object(j, "/");
  reject_unknown(j, "", {"topologies", "workloads", "budgets", "schemes",
                         "net", "costs", "output", "max_dims"});

  SweepConfig cfg;
  if (auto it = j.find("max_dims"); it != j.end()) {
    cfg.max_dims = as_int(*it, "/max_dims");
    if (cfg.max_dims < 1) fail("/max_dims", "must be >= 1");
  }

  const json& topos = require(j, "", "topologies");
  if (!topos.is_array() || topos.empty())
    fail("/topologies", "expected a non-empty list");
  for (size_t i = 0; i < topos.size(); ++i)
    cfg.topologies.push_back(parse_topology_json(
        topos[i], "/topologies[" + std::to_string(i) + "]", cfg.max_dims));

  const json& wls = require(j, "", "workloads");
  if (!wls.is_array() || wls.empty())
    fail("/workloads", "expected a non-empty list");
  for (size_t i = 0; i < wls.size(); ++i)
    cfg.workloads.push_back(
        parse_workload_json(wls[i], "/workloads[" + std::to_string(i) + "]"));

  const json& budgets = require(j, "", "budgets");
  if (!budgets.is_array() || budgets.empty())
    fail("/budgets", "expected a non-empty list");
  for (size_t i = 0; i < budgets.size(); ++i) {
    const std::string w = "/budgets[" + std::to_string(i) + "]";
    const double b = as_number(budgets[i], w);
    if (b <= 0) fail(w, "budget must be positive");
    cfg.budgets.push_back(b);
  }

  const json& schemes = require(j, "", "schemes");
  if (!schemes.is_array() || schemes.empty())
    fail("/schemes", "expected a non-empty list");
  for (size_t i = 0; i < schemes.size(); ++i) {
    const std::string w = "/schemes[" + std::to_string(i) + "]";
    try {
      cfg.schemes.push_back(parse_scheme(as_string(schemes[i], w)));
    } catch (const ConfigError& e) {
      fail(w, e.what());
    }
  }

  if (auto it = j.find("net"); it != j.end()) {
    const std::string w = "/net";
    expect_object(*it, w);
    reject_unknown(*it, w, {"link_latency", "chunks", "hops_ring", "hops_fc",
                            "hops_switch"});
    if (auto f = it->find("link_latency"); f != it->end())
      cfg.net.link_latency = as_number(*f, w + ".link_latency");
    if (auto f = it->find("chunks"); f != it->end())
      cfg.net.chunks = as_int(*f, w + ".chunks");
    if (auto f = it->find("hops_ring"); f != it->end())
      cfg.net.hops_ring = as_int(*f, w + ".hops_ring");
    if (auto f = it->find("hops_fc"); f != it->end())
      cfg.net.hops_fc = as_int(*f, w + ".hops_fc");
    if (auto f = it->find("hops_switch"); f != it->end())
      cfg.net.hops_switch = as_int(*f, w + ".hops_switch");
    try {
      cfg.net.validate();
    } catch (const ConfigError& e) {
      fail(w, e.what());
    }
  }

  if (auto it = j.find("costs"); it != j.end()) {
    const std::string w = "/costs";
    expect_object(*it, w);
    reject_unknown(*it, w,
                   {"link_per_gbps", "nic_per_gbps", "switch_per_radix_gbps"});
    if (auto f = it->find("link_per_gbps"); f != it->end())
      cfg.costs.link_per_gbps = as_number(*f, w + ".link_per_gbps");
    if (auto f = it->find("nic_per_gbps"); f != it->end())
      cfg.costs.nic_per_gbps = as_number(*f, w + ".nic_per_gbps");
    if (auto f = it->find("switch_per_radix_gbps"); f != it->end())
      cfg.costs.switch_per_radix_gbps =
          as_number(*f, w + ".switch_per_radix_gbps");
    if (cfg.costs.link_per_gbps < 0 || cfg.costs.nic_per_gbps < 0 ||
        cfg.costs.switch_per_radix_gbps < 0)
      fail(w, "unit costs must be >= 0");
  }

  if (auto it = j.find("output"); it != j.end()) {
    const std::string w = "/output";
    expect_object(*it, w);
    reject_unknown(*it, w, {"path", "format"});
    if (auto f = it->find("path"); f != it->end())
      cfg.output_path = as_string(*f, w + ".path");
    if (auto f = it->find("format"); f != it->end())
      cfg.output_format = as_string(*f, w + ".format");
    if (cfg.output_format != "csv" && cfg.output_format != "json")
      fail(w + ".format", "expected \"csv\" or \"json\"");
  }

  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

namespace {

ReportRow evaluate_row(const Topology& t, const Workload& w,
                       AllocScheme scheme, double budget,
                       const SweepConfig& cfg) {
  ReportRow row;
  row.topology = topology_name(t);
  row.workload = w.name;
  row.scheme = scheme_name(scheme);
  row.budget_gbps = budget;
  row.iteration_time_s = kNaN;
  row.compute_time_s = kNaN;
  row.mp_comm_time_s = kNaN;
  row.dp_comm_time_s = kNaN;
  row.comm_time_s = kNaN;
  row.avg_bw_utilization = kNaN;
  row.normalized_time = kNaN;
  row.perf_per_cost = kNaN;
  row.cost_total_usd = kNaN;
  row.cost_link_usd = kNaN;
  row.cost_nic_usd = kNaN;
  row.cost_switch_usd = kNaN;

  try {
    const ParallelismMapping mapping = map_parallelism(t, w);
    const BwAllocation alloc = allocate(scheme, t, w, mapping, budget);
    const SimReport sim = simulate_iteration(t, w, mapping, alloc, cfg.net);
    const CostBreakdown cost = network_cost(t, alloc.per_dim_gbps, cfg.costs);
    const TrafficBreakdown traffic = workload_traffic(t, w, mapping);

    row.ok = true;
    row.iteration_time_s = sim.iteration_time;
    row.compute_time_s = sim.compute_time;
    row.mp_comm_time_s = sim.mp_comm_time;
    row.dp_comm_time_s = sim.dp_comm_time;
    row.comm_time_s = sim.comm_time();
    row.avg_bw_utilization = sim.avg_bw_utilization;
    row.perf_per_cost = perf_per_cost(sim.iteration_time, cost.total());
    row.cost_total_usd = cost.total();
    row.cost_link_usd = cost.link_usd;
    row.cost_nic_usd = cost.nic_usd;
    row.cost_switch_usd = cost.switch_usd;
    row.bw_per_dim_gbps = alloc.per_dim_gbps;
    row.util_per_dim = sim.per_dim_utilization;
    row.traffic_per_dim_bytes.resize(traffic.mp.size());
    for (size_t i = 0; i < traffic.mp.size(); ++i)
      row.traffic_per_dim_bytes[i] = traffic.mp[i] + traffic.dp[i];
  } catch (const std::exception& e) {
    row.ok = false;
    row.reason = e.what();
  }
  return row;
}

}  // namespace

std::vector<ReportRow> run_sweep(const SweepConfig& cfg) {
  std::vector<ReportRow> rows;
  std::set<std::tuple<std::string, std::string, std::string, double>> seen;

  for (const Topology& t : cfg.topologies) {
    const std::string tname = topology_name(t);
    for (const Workload& w : cfg.workloads) {
      for (AllocScheme scheme : cfg.schemes) {
        for (double budget : cfg.budgets) {
          const auto key =
              std::make_tuple(tname, w.name, std::string(scheme_name(scheme)),
                              budget);
          if (!seen.insert(key).second) {
            std::cerr << "warning: duplicate sweep entry " << tname << "/"
                      << w.name << "/" << scheme_name(scheme) << "/" << budget
                      << " skipped\n";
            continue;
          }
          rows.push_back(evaluate_row(t, w, scheme, budget, cfg));
        }
      }
    }
  }

  // Normalization baseline: EqualBW at the sweep's lowest budget for the
  // same (topology, workload). Rows without a usable baseline keep NaN.
  const double min_budget =
      *std::min_element(cfg.budgets.begin(), cfg.budgets.end());
  std::map<std::pair<std::string, std::string>, double> base;
  for (const ReportRow& r : rows) {
    if (r.ok && r.scheme == "equal" && r.budget_gbps == min_budget)
      base[{r.topology, r.workload}] = r.iteration_time_s;
  }
  for (ReportRow& r : rows) {
    if (!r.ok) continue;
    auto it = base.find({r.topology, r.workload});
    if (it != base.end() && it->second > 0)
      r.normalized_time = r.iteration_time_s / it->second;
  }
  return rows;
}

double last_dim_traffic(const Topology& t, const Workload& w) {
  const ParallelismMapping mapping = map_parallelism(t, w);
  const TrafficBreakdown traffic = workload_traffic(t, w, mapping);
  return traffic.mp.back() + traffic.dp.back();
}

std::vector<NicTrafficRow> nic_traffic_report(const SweepConfig& cfg) {
  // Reference = deepest topology in the config (first one on ties).
  const Topology* ref = &cfg.topologies.front();
  for (const Topology& t : cfg.topologies)
    if (t.dim_count() > ref->dim_count()) ref = &t;

  std::vector<NicTrafficRow> out;
  for (const Workload& w : cfg.workloads) {
    double ref_bytes = kNaN;
    try {
      ref_bytes = last_dim_traffic(*ref, w);
    } catch (const std::exception&) {
      // Reference pair unmappable; multipliers stay NaN.
    }
    for (const Topology& t : cfg.topologies) {
      NicTrafficRow row;
      row.workload = w.name;
      row.topology = topology_name(t);
      row.dim_count = t.dim_count();
      try {
        row.last_dim_bytes = last_dim_traffic(t, w);
      } catch (const std::exception& e) {
        std::cerr << "warning: skipping " << row.topology << "/" << w.name
                  << ": " << e.what() << "\n";
        continue;
      }
      row.multiplier =
          ref_bytes > 0 ? row.last_dim_bytes / ref_bytes : kNaN;
      out.push_back(row);
    }
  }
  return out;
}

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "topology,workload,scheme,budget_gbps,iteration_time_s,compute_time_s,"
      "mp_comm_time_s,dp_comm_time_s,comm_time_s,avg_bw_utilization,"
      "normalized_time,cost_total_usd,cost_link_usd,cost_nic_usd,"
      "cost_switch_usd,perf_per_cost,bw_per_dim_gbps,util_per_dim,"
      "traffic_per_dim_bytes,status,reason\n";
  for (const ReportRow& r : rows) {
    out += csv_escape(r.topology) + ',' + csv_escape(r.workload) + ',' +
           r.scheme + ',' + fmt(r.budget_gbps) + ',' +
           fmt(r.iteration_time_s) + ',' + fmt(r.compute_time_s) + ',' +
           fmt(r.mp_comm_time_s) + ',' + fmt(r.dp_comm_time_s) + ',' +
           fmt(r.comm_time_s) + ',' + fmt(r.avg_bw_utilization) + ',' +
           fmt(r.normalized_time) + ',' + fmt(r.cost_total_usd) + ',' +
           fmt(r.cost_link_usd) + ',' + fmt(r.cost_nic_usd) + ',' +
           fmt(r.cost_switch_usd) + ',' + fmt(r.perf_per_cost) + ',' +
           fmt_list(r.bw_per_dim_gbps) + ',' + fmt_list(r.util_per_dim) + ',' +
           fmt_list(r.traffic_per_dim_bytes) + ',' +
           (r.ok ? "ok" : "skipped") + ',' + csv_escape(r.reason) + '\n';
  }
  return out;
}

std::string render_nic_csv(const std::vector<NicTrafficRow>& rows) {
  std::string out =
      "workload,topology,dim_count,last_dim_traffic_bytes,nic_multiplier\n";
  for (const NicTrafficRow& r : rows) {
    out += csv_escape(r.workload) + ',' + csv_escape(r.topology) + ',' +
           std::to_string(r.dim_count) + ',' + fmt(r.last_dim_bytes) + ',' +
           fmt(r.multiplier) + '\n';
  }
  return out;
}

nlohmann::ordered_json rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json o;
    o["topology"] = r.topology;
    o["workload"] = r.workload;
    o["scheme"] = r.scheme;
    o["budget_gbps"] = r.budget_gbps;
    o["iteration_time_s"] = num_or_null(r.iteration_time_s);
    o["compute_time_s"] = num_or_null(r.compute_time_s);
    o["mp_comm_time_s"] = num_or_null(r.mp_comm_time_s);
    o["dp_comm_time_s"] = num_or_null(r.dp_comm_time_s);
    o["comm_time_s"] = num_or_null(r.comm_time_s);
    o["avg_bw_utilization"] = num_or_null(r.avg_bw_utilization);
    o["normalized_time"] = num_or_null(r.normalized_time);
    o["cost_total_usd"] = num_or_null(r.cost_total_usd);
    o["cost_link_usd"] = num_or_null(r.cost_link_usd);
    o["cost_nic_usd"] = num_or_null(r.cost_nic_usd);
    o["cost_switch_usd"] = num_or_null(r.cost_switch_usd);
    o["perf_per_cost"] = num_or_null(r.perf_per_cost);
    o["bw_per_dim_gbps"] = list_or_null(r.bw_per_dim_gbps);
    o["util_per_dim"] = list_or_null(r.util_per_dim);
    o["traffic_per_dim_bytes"] = list_or_null(r.traffic_per_dim_bytes);
    o["status"] = r.ok ? "ok" : "skipped";
    o["reason"] = r.reason;
    arr.push_back(std::move(o));
  }
  return arr;
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& dir,
                 const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("nothing to report");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("unknown report format: " + format);

  std::filesystem::create_directories(dir);
  const std::string path = dir + "/report." + format;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (format == "csv") {
    out << render_csv(rows);
  } else {
    out << rows_to_json(rows).dump(2) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hiernet
