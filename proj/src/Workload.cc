/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/Workload.hh"

#include <cassert>

#include "hiernet/Errors.hh"

namespace hiernet {

void Workload::validate() const {
  if (name.empty()) {
    throw ConfigError("workload needs a non-empty name");
  }
  if (mp_size < 1 || dp_size < 1) {
    throw ConfigError("workload \"" + name + "\": mp_size and dp_size must be >= 1");
  }
  if (params < 0 || bytes_per_param <= 0) {
    throw ConfigError("workload \"" + name +
                      "\": params must be >= 0 and bytes_per_param > 0");
  }
  if (mp_comm_bytes < 0 || (dp_comm_bytes && *dp_comm_bytes < 0)) {
    throw ConfigError("workload \"" + name + "\": comm byte counts must be >= 0");
  }
  if (mp_size == 1 && mp_comm_bytes > 0) {
    throw ConfigError("workload \"" + name +
                      "\": mp_comm_bytes > 0 makes no sense with mp_size == 1");
  }
  if (compute_time < 0) {
    throw ConfigError("workload \"" + name + "\": compute_time must be >= 0");
  }
}

CommVolumes comm_volumes(const Workload& w) {
  w.validate();
  double dp = w.dp_comm_bytes ? *w.dp_comm_bytes : w.params * w.bytes_per_param;
  return CommVolumes{w.mp_comm_bytes, dp};
}

ParallelismMapping map_parallelism(const Topology& t, const Workload& w) {
  w.validate();
  std::int64_t total = t.npu_count();
  std::int64_t jobs = static_cast<std::int64_t>(w.mp_size) * w.dp_size;
  if (jobs != total) {
    throw ConfigError("workload \"" + w.name + "\": mp_size * dp_size = " +
                      std::to_string(jobs) + " but topology " + t.name() +
                      " has " + std::to_string(total) + " NPUs");
  }

  ParallelismMapping m;
  std::int64_t remaining = w.mp_size;
  for (int k = 1; k <= t.dim_count(); k++) {
    int size = t.dim(k).size;
    if (remaining == 1) {
      m.dp_dims.push_back(DimUse{k, size});
    } else if (remaining % size == 0) {
      m.mp_dims.push_back(DimUse{k, size});
      remaining /= size;
    } else if (size % remaining == 0) {
      // MP ends strictly inside this dimension; the rest of it serves DP.
      m.shared = SharedDim{k, static_cast<int>(remaining),
                           static_cast<int>(size / remaining)};
      remaining = 1;
    } else {
      throw ConfigError("workload \"" + w.name + "\": mp_size " +
                        std::to_string(w.mp_size) +
                        " cannot be laid out contiguously on " + t.name() +
                        " (stuck at dimension " + std::to_string(k) +
                        " with factor " + std::to_string(remaining) + ")");
    }
  }
  assert(remaining == 1 && "[map_parallelism] MP factors not fully consumed");

  std::int64_t dp_check = m.shared ? m.shared->dp_factor : 1;
  for (const auto& d : m.dp_dims) {
    dp_check *= d.factor;
  }
  assert(dp_check == w.dp_size && "[map_parallelism] DP factors do not multiply out");
  return m;
}

std::vector<CollectiveDim> mp_collective_dims(const Topology& t,
                                              const ParallelismMapping& m) {
  std::vector<CollectiveDim> dims;
  for (const auto& d : m.mp_dims) {
    dims.push_back(CollectiveDim{d.dim_index, d.factor, t.dim(d.dim_index).kind});
  }
  if (m.shared) {
    dims.push_back(CollectiveDim{m.shared->dim_index, m.shared->mp_factor,
                                 t.dim(m.shared->dim_index).kind});
  }
  return dims;
}

std::vector<CollectiveDim> dp_collective_dims(const Topology& t,
                                              const ParallelismMapping& m) {
  std::vector<CollectiveDim> dims;
  // The shared dimension is the innermost DP dimension.
  if (m.shared) {
    dims.push_back(CollectiveDim{m.shared->dim_index, m.shared->dp_factor,
                                 t.dim(m.shared->dim_index).kind});
  }
  for (const auto& d : m.dp_dims) {
    dims.push_back(CollectiveDim{d.dim_index, d.factor, t.dim(d.dim_index).kind});
  }
  return dims;
}

}  // namespace hiernet
