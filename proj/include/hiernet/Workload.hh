/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiernet/Topology.hh"

namespace hiernet {

// A training job described by its per-iteration communication demands.
// Collective payload sizes are explicit calibration inputs: nothing here
// derives traffic from a FLOP model.
struct Workload {
  std::string name;
  double params = 0.0;  // parameter count
  int mp_size = 1;      // model-parallel group size
  int dp_size = 1;      // data-parallel group size
  double bytes_per_param = 2.0;
  double mp_comm_bytes = 0.0;  // per-iteration MP all-reduce payload per NPU
  std::optional<double> dp_comm_bytes;  // defaults to params * bytes_per_param
  double compute_time = 0.0;            // seconds per iteration

  // Throws ConfigError on invalid sizes, negative byte counts, or
  // mp_comm_bytes > 0 while mp_size == 1.
  void validate() const;
};

struct CommVolumes {
  double mp_bytes;
  double dp_bytes;
};

// Resolves the per-iteration collective payloads (dp defaults to
// params * bytes_per_param). Workload must be valid.
CommVolumes comm_volumes(const Workload& w);

struct DimUse {
  int dim_index;  // 1-based topology dimension
  int factor;     // group size the parallelism occupies on that dimension
};

struct SharedDim {
  int dim_index;
  int mp_factor;  // 1 < mp_factor < dim size
  int dp_factor;  // dim size / mp_factor
};

// Placement of MP/DP groups onto topology dimensions. MP fills Dim 1 upward
// contiguously; at most one dimension is split between MP and DP; DP takes
// the remaining (outer) dimensions. mp_dims/dp_dims hold only fully-owned
// dimensions, ascending; the split dimension, if any, lives in `shared`.
struct ParallelismMapping {
  std::vector<DimUse> mp_dims;
  std::vector<DimUse> dp_dims;
  std::optional<SharedDim> shared;

  bool uses_mp() const noexcept {
    return !mp_dims.empty() || shared.has_value();
  }
  bool uses_dp() const noexcept {
    return !dp_dims.empty() || shared.has_value();
  }
};

// Computes the mapping. Throws ConfigError when mp_size * dp_size differs
// from the topology's NPU count or when mp_size cannot be laid out as
// (product of leading dim sizes) * (integer divisor of the next dim).
ParallelismMapping map_parallelism(const Topology& t, const Workload& w);

// Dimensions each sub-collective spans, innermost first, with the group size
// the collective uses on that dimension (full size, or the shared-dim
// factor). Empty when the workload does not use that parallelism kind.
struct CollectiveDim {
  int dim_index;
  int group_size;
  BlockKind block;
};

std::vector<CollectiveDim> mp_collective_dims(const Topology& t,
                                              const ParallelismMapping& m);
std::vector<CollectiveDim> dp_collective_dims(const Topology& t,
                                              const ParallelismMapping& m);

}  // namespace hiernet
