/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hiernet/BwAlloc.hh"
#include "hiernet/CostModel.hh"
#include "hiernet/Errors.hh"
#include "hiernet/Explorer.hh"
#include "hiernet/NetSim.hh"
#include "hiernet/Topology.hh"
#include "hiernet/Workload.hh"

namespace {

using namespace hiernet;

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int cmd_simulate(const std::string& config_path, std::string out_dir,
                 std::string format) {
  SweepConfig cfg = load_sweep_config(config_path);
  if (out_dir.empty()) out_dir = cfg.output_path;
  if (format.empty()) format = cfg.output_format;

  const std::vector<ReportRow> rows = run_sweep(cfg);
  emit_report(rows, out_dir, format);

  size_t skipped = 0;
  for (const ReportRow& r : rows)
    if (!r.ok) ++skipped;
  std::cout << "wrote " << out_dir << "/report." << format << " (" << rows.size()
            << " rows, " << skipped << " skipped)\n";
  return 0;
}

int cmd_cost(const std::string& topology_spec, const std::vector<double>& bw,
             const UnitCosts& costs) {
  const Topology t = parse_topology(topology_spec);
  const CostBreakdown c = network_cost(t, bw, costs);
  std::cout << "topology: " << topology_name(t) << "\n"
            << "link_usd: " << g(c.link_usd) << "\n"
            << "nic_usd: " << g(c.nic_usd) << "\n"
            << "switch_usd: " << g(c.switch_usd) << "\n"
            << "total_usd: " << g(c.total()) << "\n";
  return 0;
}

int cmd_allocate(const std::string& scheme_str, const std::string& topology_spec,
                 const std::string& workload_path, double budget) {
  const AllocScheme scheme = parse_scheme(scheme_str);
  const Topology t = parse_topology(topology_spec);
  const Workload w = load_workload_file(workload_path);
  const ParallelismMapping mapping = map_parallelism(t, w);
  const BwAllocation alloc = allocate(scheme, t, w, mapping, budget);
  const TrafficBreakdown traffic = workload_traffic(t, w, mapping);

  std::cout << "topology: " << topology_name(t) << "\n"
            << "workload: " << w.name << "\n"
            << "scheme: " << scheme_name(scheme) << "\n"
            << "budget_gbps: " << g(budget) << "\n";
  for (int k = 1; k <= t.dim_count(); ++k) {
    const DimBlock& d = t.dim(k);
    std::cout << "dim " << k << " " << block_kind_name(d.kind) << "(" << d.size
              << "): bw_gbps=" << g(alloc.bw(k))
              << " traffic_bytes=" << g(traffic.mp[k - 1] + traffic.dp[k - 1])
              << "\n";
  }
  return 0;
}

int cmd_nic_traffic(const std::string& config_path) {
  const SweepConfig cfg = load_sweep_config(config_path);
  std::cout << render_nic_csv(nic_traffic_report(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space explorer for hierarchical training interconnects"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  auto* simulate = app.add_subcommand(
      "simulate", "Run the config's sweep and write a report");
  simulate->add_option("--config", config_path, "Sweep config (JSON)")
      ->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--format", format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string cost_topology;
  std::vector<double> cost_bw;
  UnitCosts costs;
  auto* cost = app.add_subcommand(
      "cost", "Price a topology at a per-dimension bandwidth vector");
  cost->add_option("--topology", cost_topology, "Topology spec string")
      ->required();
  cost->add_option("--bw", cost_bw, "Per-dimension GB/s, comma-separated")
      ->required()
      ->delimiter(',');
  cost->add_option("--link-cost", costs.link_per_gbps, "$ per GB/s of link");
  cost->add_option("--nic-cost", costs.nic_per_gbps, "$ per GB/s of NIC");
  cost->add_option("--switch-cost", costs.switch_per_radix_gbps,
                   "$ per radix*GB/s of switch");

  std::string alloc_scheme, alloc_topology, alloc_workload;
  double alloc_budget = 0;
  auto* alloc = app.add_subcommand(
      "allocate", "Compute a bandwidth allocation for one workload");
  alloc->add_option("--scheme", alloc_scheme, "equal, message, or smart")
      ->required();
  alloc->add_option("--topology", alloc_topology, "Topology spec string")
      ->required();
  alloc->add_option("--workload", alloc_workload, "Workload file (JSON)")
      ->required();
  alloc->add_option("--budget", alloc_budget, "Total GB/s per NPU")
      ->required();

  std::string nic_config;
  auto* nic = app.add_subcommand(
      "nic-traffic", "Last-dimension traffic per workload and topology");
  nic->add_option("--config", nic_config, "Sweep config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; genuine parse errors are user input errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, format);
    if (cost->parsed()) return cmd_cost(cost_topology, cost_bw, costs);
    if (alloc->parsed())
      return cmd_allocate(alloc_scheme, alloc_topology, alloc_workload,
                          alloc_budget);
    if (nic->parsed()) return cmd_nic_traffic(nic_config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
