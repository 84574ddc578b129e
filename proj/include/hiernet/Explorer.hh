/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hiernet/BwAlloc.hh"
#include "hiernet/CostModel.hh"
#include "hiernet/NetSim.hh"
#include "hiernet/Topology.hh"
#include "hiernet/Workload.hh"

namespace hiernet {

// Everything a batch run needs: the cross-product axes plus shared network
// and cost parameters. Parsed from a single JSON document; unknown fields
// are rejected so typos fail loudly.
struct SweepConfig {
  std::vector<Topology> topologies;
  std::vector<Workload> workloads;
  std::vector<double> budgets;  // GB/s per NPU
  std::vector<AllocScheme> schemes;
  NetParams net;
  UnitCosts costs;
  std::string output_path = ".";  // directory the report lands in
  std::string output_format = "csv";
  int max_dims = Topology::kDefaultMaxDims;
};

// Throws ConfigError with a JSON-pointer-style location on any problem,
// e.g. "config error at /workloads[1].mp_size: expected an integer".
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);

// Workload record shared by the sweep config and standalone workload files.
Workload parse_workload_json(const nlohmann::json& j, const std::string& where);
Workload load_workload_file(const std::string& path);

// One evaluated (topology, workload, scheme, budget) combination. Rows for
// pairs that cannot be mapped carry skipped=status and a reason instead of
// metrics (NaN-filled); a sweep never aborts on an incompatible pair.
struct ReportRow {
  std::string topology;
  std::string workload;
  std::string scheme;
  double budget_gbps = 0;
  bool ok = false;
  std::string reason;

  double iteration_time_s = 0;
  double compute_time_s = 0;
  double mp_comm_time_s = 0;
  double dp_comm_time_s = 0;
  double comm_time_s = 0;
  double avg_bw_utilization = 0;
  // iteration_time / iteration_time of EqualBW at the sweep's lowest budget
  // for the same (topology, workload); NaN when that baseline is absent.
  double normalized_time = 0;
  double perf_per_cost = 0;
  double cost_total_usd = 0;
  double cost_link_usd = 0;
  double cost_nic_usd = 0;
  double cost_switch_usd = 0;
  std::vector<double> bw_per_dim_gbps;
  std::vector<double> util_per_dim;
  std::vector<double> traffic_per_dim_bytes;
};

// Evaluates the full cross-product in config order (topology, workload,
// scheme, budget). Exact duplicates are dropped with a stderr warning.
std::vector<ReportRow> run_sweep(const SweepConfig& cfg);

// Per-NPU bytes (both phases) crossing the outermost dimension, the traffic
// that leaves the local packaging hierarchy through NICs on switch-attached
// designs.
double last_dim_traffic(const Topology& t, const Workload& w);

// Last-dim traffic of every (workload, topology) pair, with the multiplier
// relative to the deepest topology in the config: how much more per-NPU
// egress bandwidth a shallower hierarchy needs for the same workload.
struct NicTrafficRow {
  std::string workload;
  std::string topology;
  int dim_count = 0;
  double last_dim_bytes = 0;
  double multiplier = 0;  // vs the reference (max-dim) topology
};

std::vector<NicTrafficRow> nic_traffic_report(const SweepConfig& cfg);

// Report serialization. CSV floats use 9 significant digits and per-dim
// vectors are ';'-joined inside one cell, so two identical runs produce
// byte-identical files. JSON mirrors the CSV schema with real arrays.
std::string render_csv(const std::vector<ReportRow>& rows);
std::string render_nic_csv(const std::vector<NicTrafficRow>& rows);
nlohmann::ordered_json rows_to_json(const std::vector<ReportRow>& rows);

// Writes <dir>/report.csv or <dir>/report.json, creating <dir> if needed.
// Throws std::invalid_argument on an empty row list or unknown format.
void emit_report(const std::vector<ReportRow>& rows, const std::string& dir,
                 const std::string& format);

}  // namespace hiernet
