/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <string>
#include <vector>

#include "hiernet/Workload.hh"
#include "json.hpp"

namespace hiernet {

enum class StageKind { ReduceScatter, AllGather };
enum class Algorithm { Ring, Direct, HalvingDoubling };

const char* stage_kind_name(StageKind kind) noexcept;
const char* algorithm_name(Algorithm algo) noexcept;

// Block to collective algorithm: Ring -> Ring, FC -> Direct,
// Switch -> HalvingDoubling.
Algorithm algorithm_for_block(BlockKind block) noexcept;

// One synchronous communication round. bytes_per_npu is the total payload
// each NPU transmits during the step, spread over concurrent_transfers
// parallel messages that share the NPU's per-dimension bandwidth.
struct Step {
  double bytes_per_npu;
  int concurrent_transfers;
};

// One Reduce-Scatter or All-Gather pass over a single dimension's group.
// input_bytes is the per-NPU payload entering the stage: Reduce-Scatter
// shrinks it to input/P, All-Gather grows it to input*P. Per-NPU bytes sent
// equal working_set * (P-1)/P where the working set is the large end of the
// stage (input for Reduce-Scatter, output for All-Gather).
struct Stage {
  StageKind kind;
  int dim_index;  // 1-based topology dimension the stage runs on
  int group_size;
  Algorithm algorithm;
  BlockKind block;
  double input_bytes;
  std::vector<Step> steps;

  double output_bytes() const noexcept;
  double bytes_sent_per_npu() const noexcept;  // sum over steps
};

// A 2N-stage hierarchical All-Reduce: Reduce-Scatter across dims 1..N, then
// All-Gather across dims N..1. `stages` describes one chunk; every chunk
// carries total_bytes/chunks and replays the same stage list.
struct CollectiveSchedule {
  std::vector<CollectiveDim> dims;
  std::vector<Stage> stages;
  double total_bytes = 0.0;
  int chunks = 1;
};

// Builds one stage. Throws std::invalid_argument when group_size < 2,
// input_bytes <= 0, or a Switch group size is not a power of two
// (halving-doubling requirement, by design a hard error).
Stage build_basic_stage(StageKind kind, BlockKind block, int group_size,
                        double input_bytes, int dim_index = 1);

// Builds the full hierarchical All-Reduce over the given dimensions.
// Reduce-Scatter inputs shrink by each dimension's group size as the
// schedule ascends; All-Gather mirrors on the way back down.
CollectiveSchedule build_hierarchical_allreduce(
    const std::vector<CollectiveDim>& dims, double total_bytes,
    int chunks = 1);

// Per-NPU bytes injected into each dimension by a total_bytes All-Reduce,
// in `dims` order: both stages on dim k together move
// 2 * (total / prod_{i<k} P_i) * (P_k - 1)/P_k. Zero payload gives zeros.
std::vector<double> per_dim_traffic(const std::vector<CollectiveDim>& dims,
                                    double total_bytes);

// Data-flow verification: executes the schedule's Reduce-Scatter/All-Gather
// semantics element-by-element over concrete integer payloads (one vector
// per NPU, NPU ids in mixed-radix order with dims[0] fastest; equal lengths
// divisible by chunks * product of group sizes) and checks that every NPU
// ends holding the elementwise global sum. Also cross-checks each stage's
// declared sizes against the elements actually moved; malformed schedules
// fail with the offending stage named. per_dim_bytes_sent is the transfer
// log scaled to schedule bytes, in dims order.
struct DataflowReport {
  bool ok = false;
  std::string error;
  std::vector<double> per_dim_bytes_sent;
};

DataflowReport verify_schedule_dataflow(
    const CollectiveSchedule& schedule,
    const std::vector<std::vector<long long>>& npu_initial_values);

// Debug/trace export: total bytes, chunks, and the per-chunk stage list with
// dim, kind, algorithm, and byte sizes.
nlohmann::json schedule_to_json(const CollectiveSchedule& schedule);

}  // namespace hiernet
