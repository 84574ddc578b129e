/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <string>
#include <vector>

#include "hiernet/NetSim.hh"
#include "hiernet/Workload.hh"

namespace hiernet {

enum class AllocScheme { EqualBW, MessageBW, SmartBW };

const char* scheme_name(AllocScheme scheme) noexcept;  // "equal"/"message"/"smart"
AllocScheme parse_scheme(const std::string& name);     // throws ConfigError

// Per-dimension traffic a workload pushes through each topology dimension,
// split by parallelism kind (zero where a phase does not touch a dim).
// Vectors are topology-sized, entry 0 = Dim 1.
struct TrafficBreakdown {
  std::vector<double> mp;
  std::vector<double> dp;

  double mp_total() const noexcept;
  double dp_total() const noexcept;
};

TrafficBreakdown workload_traffic(const Topology& t, const Workload& w,
                                  const ParallelismMapping& mapping);

// budget / dims on every dimension.
BwAllocation equal_bw(double budget_gbps, int dim_count);

// Proportional to per-dimension traffic. Dimensions with zero traffic get a
// floor of zero_floor_fraction * budget each, the rest is redistributed
// proportionally. Throws std::invalid_argument when all entries are zero.
BwAllocation message_bw(double budget_gbps,
                        const std::vector<double>& per_dim_bytes,
                        double zero_floor_fraction = 0.001);

// Square-root split between the two sequential phases: minimizing
// mp_bytes/x + dp_bytes/y subject to x + y = budget gives
// x = budget * sqrt(mp_bytes) / (sqrt(mp_bytes) + sqrt(dp_bytes)).
struct GroupSplit {
  double bw_mp;
  double bw_dp;
};

GroupSplit smart_bw_unshared(double budget_gbps, double mp_bytes,
                             double dp_bytes);

// Split when one dimension carries both phases. r_mp/r_dp are the fractions
// of each phase's traffic that run on the shared dimension. Minimizes
//   mp_bytes/x + dp_bytes/y
// subject to
//   (1-r_mp)*x + (1-r_dp)*y + max(r_mp*x, r_dp*y) = budget
// (the shared dim is provisioned once, at the larger of the two phase
// demands). Solved by golden-section search on each branch of the max to
// 1e-9 relative tolerance, iteration cap 200; throws std::runtime_error if
// the cap is hit first. bw_shared = max(r_mp*x, r_dp*y).
struct SharedSplit {
  double bw_mp;
  double bw_dp;
  double bw_shared;
};

SharedSplit smart_bw_shared(double budget_gbps, double mp_bytes,
                            double dp_bytes, double r_mp, double r_dp);

// Full per-dimension allocation for a mapped workload under a scheme.
// MessageBW distributes the budget proportionally to total per-dim traffic;
// SmartBW splits between phases first (unshared or shared form), then
// proportionally to per-dim traffic within each phase. Workloads that use
// only one phase make SmartBW return exactly the MessageBW allocation.
BwAllocation allocate(AllocScheme scheme, const Topology& t, const Workload& w,
                      const ParallelismMapping& mapping, double budget_gbps);

}  // namespace hiernet
