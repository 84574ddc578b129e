/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/CollectiveSchedule.hh"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace hiernet {

const char* stage_kind_name(StageKind kind) noexcept {
  return kind == StageKind::ReduceScatter ? "reduce_scatter" : "all_gather";
}

const char* algorithm_name(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::Ring:
      return "ring";
    case Algorithm::Direct:
      return "direct";
    case Algorithm::HalvingDoubling:
      return "halving_doubling";
  }
  assert(false && "[algorithm_name] unknown algorithm");
  return "?";
}

Algorithm algorithm_for_block(BlockKind block) noexcept {
  switch (block) {
    case BlockKind::Ring:
      return Algorithm::Ring;
    case BlockKind::FullyConnected:
      return Algorithm::Direct;
    case BlockKind::Switch:
      return Algorithm::HalvingDoubling;
  }
  assert(false && "[algorithm_for_block] unknown block kind");
  return Algorithm::Ring;
}

double Stage::output_bytes() const noexcept {
  return kind == StageKind::ReduceScatter ? input_bytes / group_size
                                          : input_bytes * group_size;
}

double Stage::bytes_sent_per_npu() const noexcept {
  double sent = 0.0;
  for (const auto& s : steps) {
    sent += s.bytes_per_npu;
  }
  return sent;
}

namespace {

bool is_power_of_two(int v) noexcept {
  return v > 0 && (v & (v - 1)) == 0;
}

int log2_exact(int v) noexcept {
  int bits = 0;
  while ((1 << bits) < v) {
    bits++;
  }
  return bits;
}

}  // namespace

Stage build_basic_stage(StageKind kind, BlockKind block, int group_size,
                        double input_bytes, int dim_index) {
  if (group_size < 2) {
    throw std::invalid_argument("collective stage needs group_size >= 2, got " +
                                std::to_string(group_size));
  }
  if (!(input_bytes > 0)) {
    throw std::invalid_argument("collective stage needs input_bytes > 0");
  }
  Algorithm algo = algorithm_for_block(block);
  if (algo == Algorithm::HalvingDoubling && !is_power_of_two(group_size)) {
    throw std::invalid_argument(
        "halving-doubling needs a power-of-two group size, got " +
        std::to_string(group_size));
  }

  Stage stage;
  stage.kind = kind;
  stage.dim_index = dim_index;
  stage.group_size = group_size;
  stage.algorithm = algo;
  stage.block = block;
  stage.input_bytes = input_bytes;

  const int p = group_size;
  const bool rs = kind == StageKind::ReduceScatter;
  // Working set: input for Reduce-Scatter, output for All-Gather. Each stage
  // moves working * (P-1)/P per NPU; the shard unit is working / P.
  const double shard = rs ? input_bytes / p : input_bytes;

  switch (algo) {
    case Algorithm::Ring:
      // P-1 neighbor rounds, one shard each.
      stage.steps.assign(p - 1, Step{shard, 1});
      break;
    case Algorithm::Direct:
      // One round, P-1 parallel peer transfers sharing the NPU's bandwidth.
      stage.steps.assign(1, Step{shard * (p - 1), p - 1});
      break;
    case Algorithm::HalvingDoubling: {
      // Pairwise exchanges over log2(P) rounds. Reduce-Scatter halves the
      // payload each round; All-Gather mirrors it back up.
      int rounds = log2_exact(p);
      for (int i = 0; i < rounds; i++) {
        double bytes = rs ? input_bytes / static_cast<double>(1 << (i + 1))
                          : input_bytes * static_cast<double>(1 << i);
        stage.steps.push_back(Step{bytes, 1});
      }
      break;
    }
  }
  return stage;
}

CollectiveSchedule build_hierarchical_allreduce(
    const std::vector<CollectiveDim>& dims, double total_bytes, int chunks) {
  if (dims.empty()) {
    throw std::invalid_argument("hierarchical all-reduce needs at least one dimension");
  }
  if (!(total_bytes > 0)) {
    throw std::invalid_argument("hierarchical all-reduce needs total_bytes > 0");
  }
  if (chunks < 1) {
    throw std::invalid_argument("chunk count must be >= 1");
  }

  CollectiveSchedule sched;
  sched.dims = dims;
  sched.total_bytes = total_bytes;
  sched.chunks = chunks;

  const double chunk_bytes = total_bytes / chunks;
  const int n = static_cast<int>(dims.size());

  // Reduce-Scatter ascending: each dimension shrinks the payload by its
  // group size before handing it up.
  double in = chunk_bytes;
  for (int k = 0; k < n; k++) {
    sched.stages.push_back(build_basic_stage(StageKind::ReduceScatter,
                                             dims[k].block, dims[k].group_size,
                                             in, dims[k].dim_index));
    in /= dims[k].group_size;
  }
  // All-Gather descending mirrors the sizes back up.
  for (int k = n - 1; k >= 0; k--) {
    sched.stages.push_back(build_basic_stage(StageKind::AllGather,
                                             dims[k].block, dims[k].group_size,
                                             in, dims[k].dim_index));
    in *= dims[k].group_size;
  }
  assert(std::abs(in - chunk_bytes) <= 1e-9 * chunk_bytes &&
         "[build_hierarchical_allreduce] sizes do not mirror");
  return sched;
}

std::vector<double> per_dim_traffic(const std::vector<CollectiveDim>& dims,
                                    double total_bytes) {
  if (total_bytes < 0) {
    throw std::invalid_argument("per_dim_traffic needs total_bytes >= 0");
  }
  if (total_bytes == 0) {
    return std::vector<double>(dims.size(), 0.0);
  }
  auto sched = build_hierarchical_allreduce(dims, total_bytes, 1);
  std::vector<double> traffic(dims.size(), 0.0);
  for (const auto& stage : sched.stages) {
    for (std::size_t k = 0; k < dims.size(); k++) {
      if (dims[k].dim_index == stage.dim_index &&
          dims[k].group_size == stage.group_size) {
        traffic[k] += stage.bytes_sent_per_npu();
        break;
      }
    }
  }
  return traffic;
}

namespace {

// Element-level executor used by verify_schedule_dataflow. Tracks, per NPU,
// the contiguous index window it currently holds and the (partial) sums in
// it. Group membership comes from mixed-radix NPU ids, dims[0] fastest.
struct NpuSegment {
  std::size_t offset = 0;
  std::vector<long long> values;
};

std::string stage_label(const Stage& stage, int stage_index) {
  std::ostringstream os;
  os << "stage " << stage_index << " (" << stage_kind_name(stage.kind)
     << " on dim " << stage.dim_index << ", P=" << stage.group_size << ")";
  return os.str();
}

}  // namespace

DataflowReport verify_schedule_dataflow(
    const CollectiveSchedule& schedule,
    const std::vector<std::vector<long long>>& npu_initial_values) {
  DataflowReport rep;
  rep.per_dim_bytes_sent.assign(schedule.dims.size(), 0.0);

  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.error = msg;
    return rep;
  };

  std::size_t npus = 1;
  for (const auto& d : schedule.dims) {
    npus *= static_cast<std::size_t>(d.group_size);
  }
  if (npu_initial_values.size() != npus) {
    return fail("expected " + std::to_string(npus) + " NPU vectors, got " +
                std::to_string(npu_initial_values.size()));
  }
  const std::size_t length = npu_initial_values.empty()
                                 ? 0
                                 : npu_initial_values[0].size();
  for (const auto& v : npu_initial_values) {
    if (v.size() != length) {
      return fail("NPU vectors must all have the same length");
    }
  }
  const std::size_t chunks = static_cast<std::size_t>(schedule.chunks);
  if (length == 0 || length % (npus * chunks) != 0) {
    return fail("vector length must be a positive multiple of chunks * total group size");
  }
  if (schedule.stages.size() != 2 * schedule.dims.size()) {
    return fail("schedule must hold exactly two stages per dimension");
  }

  // Expected global sum.
  std::vector<long long> expected(length, 0);
  for (const auto& v : npu_initial_values) {
    for (std::size_t i = 0; i < length; i++) {
      expected[i] += v[i];
    }
  }

  // Dimension strides in the mixed-radix id space.
  const int n = static_cast<int>(schedule.dims.size());
  std::vector<std::size_t> stride(n, 1);
  for (int k = 1; k < n; k++) {
    stride[k] = stride[k - 1] *
                static_cast<std::size_t>(schedule.dims[k - 1].group_size);
  }
  auto dim_slot = [&](const Stage& stage) {
    for (int k = 0; k < n; k++) {
      if (schedule.dims[k].dim_index == stage.dim_index &&
          schedule.dims[k].group_size == stage.group_size) {
        return k;
      }
    }
    return -1;
  };

  const double bytes_per_element = schedule.total_bytes / length;
  const std::size_t chunk_len = length / chunks;
  std::vector<std::vector<long long>> result(npus);
  std::vector<double> elements_sent(n, 0.0);

  for (std::size_t c = 0; c < chunks; c++) {
    std::vector<NpuSegment> state(npus);
    for (std::size_t id = 0; id < npus; id++) {
      state[id].offset = c * chunk_len;
      state[id].values.assign(npu_initial_values[id].begin() + c * chunk_len,
                              npu_initial_values[id].begin() + (c + 1) * chunk_len);
    }

    for (std::size_t si = 0; si < schedule.stages.size(); si++) {
      const Stage& stage = schedule.stages[si];
      int k = dim_slot(stage);
      if (k < 0) {
        return fail(stage_label(stage, static_cast<int>(si)) +
                    ": no matching schedule dimension");
      }
      const std::size_t p = static_cast<std::size_t>(stage.group_size);
      const std::size_t st = stride[k];
      const std::size_t seg_len = state[0].values.size();

      // Declared stage size must match the live working set.
      double live_bytes = static_cast<double>(seg_len) * bytes_per_element;
      if (std::abs(live_bytes - stage.input_bytes) > 1e-6 * live_bytes) {
        return fail(stage_label(stage, static_cast<int>(si)) +
                    ": declared input_bytes do not match the live payload");
      }

      // Enumerate dim-k groups: ids equal in every other coordinate.
      for (std::size_t base = 0; base < npus; base++) {
        if ((base / st) % p != 0) {
          continue;
        }
        std::vector<std::size_t> members(p);
        for (std::size_t j = 0; j < p; j++) {
          members[j] = base + j * st;
        }

        if (stage.kind == StageKind::ReduceScatter) {
          if (seg_len % p != 0) {
            return fail(stage_label(stage, static_cast<int>(si)) +
                        ": payload does not split across the group");
          }
          const std::size_t part = seg_len / p;
          std::size_t off = state[members[0]].offset;
          for (std::size_t j = 1; j < p; j++) {
            if (state[members[j]].offset != off ||
                state[members[j]].values.size() != seg_len) {
              return fail(stage_label(stage, static_cast<int>(si)) +
                          ": group members disagree on the working window");
            }
          }
          std::vector<std::vector<long long>> reduced(p);
          for (std::size_t j = 0; j < p; j++) {
            reduced[j].assign(part, 0);
            for (std::size_t m = 0; m < p; m++) {
              const auto& src = state[members[m]].values;
              for (std::size_t i = 0; i < part; i++) {
                reduced[j][i] += src[j * part + i];
              }
            }
          }
          for (std::size_t j = 0; j < p; j++) {
            state[members[j]].offset = off + j * part;
            state[members[j]].values = std::move(reduced[j]);
          }
          elements_sent[k] += static_cast<double>((p - 1) * part);
        } else {
          // All-Gather: members hold consecutive windows in rank order.
          const std::size_t part = seg_len;
          std::size_t off = state[members[0]].offset;
          for (std::size_t j = 0; j < p; j++) {
            if (state[members[j]].offset != off + j * part ||
                state[members[j]].values.size() != part) {
              return fail(stage_label(stage, static_cast<int>(si)) +
                          ": group windows are not adjacent in rank order");
            }
          }
          std::vector<long long> joined;
          joined.reserve(part * p);
          for (std::size_t j = 0; j < p; j++) {
            joined.insert(joined.end(), state[members[j]].values.begin(),
                          state[members[j]].values.end());
          }
          for (std::size_t j = 0; j < p; j++) {
            state[members[j]].offset = off;
            state[members[j]].values = joined;
          }
          elements_sent[k] += static_cast<double>((p - 1) * part);
        }
      }

      // Cross-check the stage's declared transfer volume (per NPU).
      double declared = stage.bytes_sent_per_npu();
      double moved = (stage.kind == StageKind::ReduceScatter
                          ? static_cast<double>(seg_len) * (p - 1) / p
                          : static_cast<double>(seg_len) * (p - 1)) *
                     bytes_per_element;
      if (std::abs(declared - moved) > 1e-6 * moved) {
        return fail(stage_label(stage, static_cast<int>(si)) +
                    ": declared step bytes do not match the data actually moved");
      }
    }

    for (std::size_t id = 0; id < npus; id++) {
      if (state[id].offset != c * chunk_len ||
          state[id].values.size() != chunk_len) {
        return fail("NPU " + std::to_string(id) +
                    " does not end holding the full payload window");
      }
      result[id].insert(result[id].end(), state[id].values.begin(),
                        state[id].values.end());
    }
  }

  for (std::size_t id = 0; id < npus; id++) {
    if (result[id] != expected) {
      return fail("NPU " + std::to_string(id) +
                  " ends with values different from the global sum");
    }
  }

  // elements_sent logged one member's share once per group (npus/P groups
  // per stage); scale back to a single NPU and to schedule bytes.
  for (int k = 0; k < n; k++) {
    rep.per_dim_bytes_sent[k] =
        elements_sent[k] * static_cast<double>(schedule.dims[k].group_size) /
        static_cast<double>(npus) * bytes_per_element;
  }
  rep.ok = true;
  return rep;
}

nlohmann::json schedule_to_json(const CollectiveSchedule& schedule) {
  nlohmann::json j;
  j["total_bytes"] = schedule.total_bytes;
  j["chunks"] = schedule.chunks;
  j["dims"] = nlohmann::json::array();
  for (const auto& d : schedule.dims) {
    j["dims"].push_back({{"dim", d.dim_index},
                         {"group_size", d.group_size},
                         {"block", block_kind_name(d.block)}});
  }
  j["stages"] = nlohmann::json::array();
  for (const auto& s : schedule.stages) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : s.steps) {
      steps.push_back({{"bytes_per_npu", step.bytes_per_npu},
                       {"concurrent_transfers", step.concurrent_transfers}});
    }
    j["stages"].push_back({{"kind", stage_kind_name(s.kind)},
                           {"dim", s.dim_index},
                           {"group_size", s.group_size},
                           {"algorithm", algorithm_name(s.algorithm)},
                           {"block", block_kind_name(s.block)},
                           {"input_bytes", s.input_bytes},
                           {"output_bytes", s.output_bytes()},
                           {"bytes_sent_per_npu", s.bytes_sent_per_npu()},
                           {"steps", steps}});
  }
  return j;
}

}  // namespace hiernet
