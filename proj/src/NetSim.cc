/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/NetSim.hh"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "hiernet/Errors.hh"

namespace hiernet {

int NetParams::hops_for(BlockKind block) const noexcept {
  switch (block) {
    case BlockKind::Ring:
      return hops_ring;
    case BlockKind::FullyConnected:
      return hops_fc;
    case BlockKind::Switch:
      return hops_switch;
  }
  assert(false && "[NetParams::hops_for] unknown block kind");
  return 1;
}

void NetParams::validate() const {
  if (link_latency < 0) {
    throw ConfigError("link_latency must be >= 0");
  }
  if (chunks < 1) {
    throw ConfigError("chunks must be >= 1");
  }
  if (hops_ring < 1 || hops_fc < 1 || hops_switch < 1) {
    throw ConfigError("hop counts must be >= 1");
  }
}

double BwAllocation::bw(int dim_index) const {
  assert(dim_index >= 1 &&
         dim_index <= static_cast<int>(per_dim_gbps.size()) &&
         "[BwAllocation::bw] dim_index out of range");
  return per_dim_gbps[dim_index - 1];
}

void BwAllocation::validate() const {
  if (per_dim_gbps.empty() || !(budget_gbps > 0)) {
    throw std::invalid_argument("bandwidth allocation needs dims and a positive budget");
  }
  double sum = 0.0;
  for (double b : per_dim_gbps) {
    if (!(b > 0)) {
      throw std::invalid_argument("bandwidth allocation entries must be positive");
    }
    sum += b;
  }
  if (std::abs(sum - budget_gbps) > 1e-9 * budget_gbps) {
    throw std::invalid_argument("bandwidth allocation does not add up to the budget");
  }
}

double transfer_time(double bytes, double bandwidth_gbps, int hops,
                     double link_latency) {
  if (!(bandwidth_gbps > 0)) {
    throw std::invalid_argument("transfer_time needs bandwidth > 0");
  }
  if (bytes < 0 || hops < 0 || link_latency < 0) {
    throw std::invalid_argument("transfer_time needs non-negative bytes/hops/latency");
  }
  return link_latency * hops + bytes / (bandwidth_gbps * kBytesPerGb);
}

double stage_duration(const Stage& stage, double bandwidth_gbps,
                      const NetParams& params) {
  const int hops = params.hops_for(stage.block);
  double total = 0.0;
  for (const auto& step : stage.steps) {
    total += transfer_time(step.bytes_per_npu, bandwidth_gbps, hops,
                           params.link_latency);
  }
  return total;
}

CommReport simulate_collective(const CollectiveSchedule& schedule,
                               const BwAllocation& alloc,
                               const NetParams& params) {
  alloc.validate();
  params.validate();

  const int n_dims = static_cast<int>(alloc.per_dim_gbps.size());
  CommReport rep;
  rep.per_dim_busy.assign(n_dims, 0.0);
  rep.per_dim_bytes.assign(n_dims, 0.0);
  if (schedule.stages.empty() || schedule.total_bytes <= 0) {
    return rep;
  }

  const int n_stages = static_cast<int>(schedule.stages.size());
  const int chunks = schedule.chunks;
  std::vector<double> duration(n_stages);
  std::vector<int> dim_of(n_stages);
  for (int s = 0; s < n_stages; s++) {
    const Stage& stage = schedule.stages[s];
    if (stage.dim_index < 1 || stage.dim_index > n_dims) {
      throw std::invalid_argument("schedule references dimension " +
                                  std::to_string(stage.dim_index) +
                                  " outside the bandwidth allocation");
    }
    dim_of[s] = stage.dim_index - 1;
    duration[s] = stage_duration(stage, alloc.bw(stage.dim_index), params);
    rep.per_dim_bytes[dim_of[s]] += stage.bytes_sent_per_npu() * chunks;
  }

  // Discrete-event FIFO pipeline. Events ordered by (time, kind, chunk,
  // stage) with arrivals (kind 0) ahead of frees (kind 1) so a dimension
  // freed at t sees everything that arrived at t.
  using Event = std::tuple<double, int, int, int>;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
  using Waiting = std::tuple<double, int, int>;  // arrival, chunk, stage
  std::vector<std::set<Waiting>> waiting(n_dims);
  std::vector<bool> busy(n_dims, false);

  auto start_job = [&](double now, const Waiting& job) {
    auto [arrival, chunk, stage] = job;
    assert(arrival <= now && "[simulate_collective] job started before arrival");
    int k = dim_of[stage];
    double finish = now + duration[stage];
    busy[k] = true;
    rep.per_dim_busy[k] += duration[stage];
    rep.jobs.push_back(
        ScheduledJob{chunk, stage, schedule.stages[stage].dim_index, now, finish});
    events.push(Event{finish, 1, chunk, stage});
    rep.comm_time = std::max(rep.comm_time, finish);
  };

  for (int c = 0; c < chunks; c++) {
    events.push(Event{0.0, 0, c, 0});
  }
  while (!events.empty()) {
    auto [time, kind, chunk, stage] = events.top();
    events.pop();
    int k = dim_of[stage];
    if (kind == 0) {
      waiting[k].insert(Waiting{time, chunk, stage});
      if (!busy[k]) {
        auto head = *waiting[k].begin();
        waiting[k].erase(waiting[k].begin());
        start_job(time, head);
      }
    } else {
      busy[k] = false;
      if (stage + 1 < n_stages) {
        events.push(Event{time, 0, chunk, stage + 1});
      }
      if (!waiting[k].empty()) {
        auto head = *waiting[k].begin();
        waiting[k].erase(waiting[k].begin());
        start_job(time, head);
      }
    }
  }
  return rep;
}

SimReport simulate_iteration(const Topology& t, const Workload& w,
                             const ParallelismMapping& mapping,
                             const BwAllocation& alloc,
                             const NetParams& params) {
  if (static_cast<int>(alloc.per_dim_gbps.size()) != t.dim_count()) {
    throw std::invalid_argument("bandwidth allocation does not cover every topology dimension");
  }
  auto vols = comm_volumes(w);

  SimReport rep;
  rep.compute_time = w.compute_time;
  rep.per_dim_busy.assign(t.dim_count(), 0.0);
  rep.per_dim_bytes.assign(t.dim_count(), 0.0);
  rep.per_dim_utilization.assign(t.dim_count(), 0.0);

  auto run_phase = [&](const std::vector<CollectiveDim>& dims, double bytes,
                       double* phase_time) {
    if (dims.empty() || bytes <= 0) {
      return;
    }
    auto sched = build_hierarchical_allreduce(dims, bytes, params.chunks);
    auto phase = simulate_collective(sched, alloc, params);
    *phase_time = phase.comm_time;
    for (int k = 0; k < t.dim_count(); k++) {
      rep.per_dim_busy[k] += phase.per_dim_busy[k];
      rep.per_dim_bytes[k] += phase.per_dim_bytes[k];
    }
  };

  run_phase(mp_collective_dims(t, mapping), vols.mp_bytes, &rep.mp_comm_time);
  run_phase(dp_collective_dims(t, mapping), vols.dp_bytes, &rep.dp_comm_time);

  rep.iteration_time = rep.compute_time + rep.mp_comm_time + rep.dp_comm_time;
  const double window = rep.comm_time();
  if (window > 0) {
    double weighted = 0.0;
    for (int k = 0; k < t.dim_count(); k++) {
      rep.per_dim_utilization[k] = rep.per_dim_busy[k] / window;
      weighted += alloc.per_dim_gbps[k] * rep.per_dim_busy[k];
    }
    rep.avg_bw_utilization = weighted / (alloc.budget_gbps * window);
  }
  return rep;
}

}  // namespace hiernet
