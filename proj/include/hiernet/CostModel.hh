/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <vector>

#include "hiernet/Topology.hh"

namespace hiernet {

// Dollars per GB/s of provisioned capacity. NICs and switches are only
// charged on Switch dimensions; Ring and FC dims connect NPUs directly.
struct UnitCosts {
  double link_per_gbps = 2.0;
  double nic_per_gbps = 48.0;
  double switch_per_radix_gbps = 24.0;
};

struct CostBreakdown {
  double link_usd = 0;
  double nic_usd = 0;
  double switch_usd = 0;

  double total() const noexcept { return link_usd + nic_usd + switch_usd; }
};

// Network build-out cost for per-dimension link bandwidths (GB/s per NPU).
// Every NPU attaches one link per dimension; a Switch(P) dimension adds a
// NIC per NPU and npus/P switches of radix P. Zero bandwidth on a dimension
// contributes zero cost.
CostBreakdown network_cost(const Topology& t,
                           const std::vector<double>& per_dim_gbps,
                           const UnitCosts& costs = UnitCosts{});

// 1 / (iteration_time * total_cost); higher is better.
double perf_per_cost(double iteration_time, double total_cost_usd);

}  // namespace hiernet
