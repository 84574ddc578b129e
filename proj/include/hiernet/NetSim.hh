/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <vector>

#include "hiernet/CollectiveSchedule.hh"
#include "hiernet/Workload.hh"

namespace hiernet {

// Latency/chunking knobs for the analytical timing model:
//   transfer time = link_latency * hops + bytes / bandwidth.
// Hops per traversal: ring and fully-connected links reach the peer
// directly, a switch adds one extra hop.
struct NetParams {
  double link_latency = 500e-9;  // seconds per hop
  int chunks = 4;
  int hops_ring = 1;
  int hops_fc = 1;
  int hops_switch = 2;

  int hops_for(BlockKind block) const noexcept;
  void validate() const;  // throws ConfigError on bad values
};

// Per-dimension bandwidth assignment. Entries are GB/s per NPU, indexed by
// topology dimension (entry 0 = Dim 1); they must be positive and sum to the
// budget within 1e-9 relative.
struct BwAllocation {
  std::vector<double> per_dim_gbps;
  double budget_gbps = 0.0;

  double bw(int dim_index) const;  // 1-based
  void validate() const;           // throws std::invalid_argument
};

constexpr double kBytesPerGb = 1e9;

// Single message: link_latency * hops + bytes / bandwidth.
// Throws std::invalid_argument for non-positive bandwidth or negative sizes.
double transfer_time(double bytes, double bandwidth_gbps, int hops,
                     double link_latency);

// Serial time of one stage at the given per-NPU dimension bandwidth: the sum
// of its steps' transfer times. Concurrent transfers within a step share the
// bandwidth, so a step costs one latency charge plus its total bytes.
double stage_duration(const Stage& stage, double bandwidth_gbps,
                      const NetParams& params);

struct ScheduledJob {
  int chunk;
  int stage_index;
  int dim_index;
  double start;
  double finish;
};

// Result of simulating one collective. per_dim vectors are indexed by
// topology dimension (size = allocation size); jobs is the executed
// chunk-stage timeline in start order.
struct CommReport {
  double comm_time = 0.0;
  std::vector<double> per_dim_busy;
  std::vector<double> per_dim_bytes;
  std::vector<ScheduledJob> jobs;
};

// Chunked pipelined execution. Each dimension is one serial half-duplex
// resource: it runs one chunk-stage at a time and serves them in arrival
// (FIFO) order, ties broken by chunk then stage index. A chunk's stage s
// becomes ready when its stage s-1 finishes; all chunks are ready for their
// first stage at t=0 in chunk order.
CommReport simulate_collective(const CollectiveSchedule& schedule,
                               const BwAllocation& alloc,
                               const NetParams& params);

// One training iteration: MP All-Reduce, then DP All-Reduce, strictly
// sequential (a shared dimension serves both phases one after the other),
// plus compute. Utilization is measured over the communication window only:
//   avg = sum_k BW(k) * busy(k) / (budget * (mp_comm_time + dp_comm_time)).
struct SimReport {
  double iteration_time = 0.0;
  double compute_time = 0.0;
  double mp_comm_time = 0.0;
  double dp_comm_time = 0.0;
  double avg_bw_utilization = 0.0;
  std::vector<double> per_dim_utilization;
  std::vector<double> per_dim_busy;
  std::vector<double> per_dim_bytes;

  double comm_time() const noexcept { return mp_comm_time + dp_comm_time; }
};

SimReport simulate_iteration(const Topology& t, const Workload& w,
                             const ParallelismMapping& mapping,
                             const BwAllocation& alloc,
                             const NetParams& params);

}  // namespace hiernet
