/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/BwAlloc.hh"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hiernet/CollectiveSchedule.hh"
#include "hiernet/Errors.hh"

namespace hiernet {

const char* scheme_name(AllocScheme scheme) noexcept {
  switch (scheme) {
    case AllocScheme::EqualBW:
      return "equal";
    case AllocScheme::MessageBW:
      return "message";
    case AllocScheme::SmartBW:
      return "smart";
  }
  return "?";
}

AllocScheme parse_scheme(const std::string& name) {
  if (name == "equal") return AllocScheme::EqualBW;
  if (name == "message") return AllocScheme::MessageBW;
  if (name == "smart") return AllocScheme::SmartBW;
  throw ConfigError("unknown bandwidth scheme '" + name +
                    "' (expected equal, message, or smart)");
}

double TrafficBreakdown::mp_total() const noexcept {
  return std::accumulate(mp.begin(), mp.end(), 0.0);
}

double TrafficBreakdown::dp_total() const noexcept {
  return std::accumulate(dp.begin(), dp.end(), 0.0);
}

TrafficBreakdown workload_traffic(const Topology& t, const Workload& w,
                                  const ParallelismMapping& mapping) {
  TrafficBreakdown out;
  out.mp.assign(t.dim_count(), 0.0);
  out.dp.assign(t.dim_count(), 0.0);

  const CommVolumes vol = comm_volumes(w);
  if (mapping.uses_mp() && vol.mp_bytes > 0) {
    const auto dims = mp_collective_dims(t, mapping);
    const auto traffic = per_dim_traffic(dims, vol.mp_bytes);
    for (size_t i = 0; i < dims.size(); ++i)
      out.mp[dims[i].dim_index - 1] += traffic[i];
  }
  if (mapping.uses_dp() && vol.dp_bytes > 0) {
    const auto dims = dp_collective_dims(t, mapping);
    const auto traffic = per_dim_traffic(dims, vol.dp_bytes);
    for (size_t i = 0; i < dims.size(); ++i)
      out.dp[dims[i].dim_index - 1] += traffic[i];
  }
  return out;
}

BwAllocation equal_bw(double budget_gbps, int dim_count) {
  if (budget_gbps <= 0) throw std::invalid_argument("budget must be positive");
  if (dim_count < 1) throw std::invalid_argument("dim_count must be >= 1");
  BwAllocation alloc;
  alloc.budget_gbps = budget_gbps;
  alloc.per_dim_gbps.assign(dim_count, budget_gbps / dim_count);
  alloc.validate();
  return alloc;
}

BwAllocation message_bw(double budget_gbps,
                        const std::vector<double>& per_dim_bytes,
                        double zero_floor_fraction) {
  if (budget_gbps <= 0) throw std::invalid_argument("budget must be positive");
  if (per_dim_bytes.empty())
    throw std::invalid_argument("need at least one dimension");
  double total = 0;
  for (double b : per_dim_bytes) {
    if (b < 0) throw std::invalid_argument("negative per-dim traffic");
    total += b;
  }
  if (total <= 0)
    throw std::invalid_argument("all-zero traffic: no basis for proportions");

  BwAllocation alloc;
  alloc.budget_gbps = budget_gbps;
  alloc.per_dim_gbps.resize(per_dim_bytes.size());

  // Zero-traffic dims still need a usable link; give each a small floor and
  // share the remainder proportionally among the active dims.
  const double floor_bw = budget_gbps * zero_floor_fraction;
  int zero_dims = 0;
  for (double b : per_dim_bytes)
    if (b == 0) ++zero_dims;
  const double active_budget = budget_gbps - floor_bw * zero_dims;
  assert(active_budget > 0);

  for (size_t i = 0; i < per_dim_bytes.size(); ++i) {
    alloc.per_dim_gbps[i] =
        per_dim_bytes[i] == 0 ? floor_bw
                              : active_budget * per_dim_bytes[i] / total;
  }
  alloc.validate();
  return alloc;
}

GroupSplit smart_bw_unshared(double budget_gbps, double mp_bytes,
                             double dp_bytes) {
  if (budget_gbps <= 0) throw std::invalid_argument("budget must be positive");
  if (mp_bytes <= 0 || dp_bytes <= 0)
    throw std::invalid_argument("both phases need positive traffic");
  const double sm = std::sqrt(mp_bytes);
  const double sd = std::sqrt(dp_bytes);
  GroupSplit split;
  split.bw_mp = budget_gbps * sm / (sm + sd);
  split.bw_dp = budget_gbps - split.bw_mp;
  return split;
}

namespace {

// Minimizes f over [lo, hi] by golden-section search. f must be unimodal on
// the interval (the phase-time objectives below are strictly convex).
template <class F>
double golden_min(F f, double lo, double hi, double rel_tol, int max_iter) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter; ++i) {
    if (b - a <= rel_tol * std::max(std::abs(a), std::abs(b))) {
      return 0.5 * (a + b);
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  throw std::runtime_error("bandwidth split search did not converge");
}

}  // namespace

SharedSplit smart_bw_shared(double budget_gbps, double mp_bytes,
                            double dp_bytes, double r_mp, double r_dp) {
  if (budget_gbps <= 0) throw std::invalid_argument("budget must be positive");
  if (mp_bytes <= 0 || dp_bytes <= 0)
    throw std::invalid_argument("both phases need positive traffic");
  if (r_mp < 0 || r_mp > 1 || r_dp < 0 || r_dp > 1)
    throw std::invalid_argument("shared fractions must lie in [0, 1]");

  const double B = budget_gbps;
  const double kRelTol = 1e-9;
  const int kMaxIter = 200;

  // No shared traffic at all: the constraint degenerates to x + y = B and
  // the closed form applies.
  if (r_mp == 0 && r_dp == 0) {
    const GroupSplit flat = smart_bw_unshared(B, mp_bytes, dp_bytes);
    return {flat.bw_mp, flat.bw_dp, 0.0};
  }

  const auto objective = [&](double x, double y) {
    return mp_bytes / x + dp_bytes / y;
  };

  double best_x = -1, best_y = -1, best_f = HUGE_VAL;
  const auto consider = [&](double x, double y) {
    if (x <= 0 || y <= 0) return;
    const double f = objective(x, y);
    if (f < best_f) {
      best_f = f;
      best_x = x;
      best_y = y;
    }
  };

  // Branch A: the MP demand dominates the shared dim (r_mp*x >= r_dp*y).
  // Constraint becomes x + (1-r_dp)*y = B.
  if (r_dp == 1.0) {
    // y drops out of the constraint; spend everything on x and let the
    // shared dim carry DP at r_mp*x.
    if (r_mp > 0) consider(B, r_mp * B / r_dp);
  } else {
    // Feasibility: y = (B-x)/(1-r_dp) and r_mp*x >= r_dp*y bound x below.
    const double x_min =
        r_mp > 0 ? B * r_dp / (r_mp * (1 - r_dp) + r_dp) : HUGE_VAL;
    if (x_min < B) {
      const double lo = std::max(x_min, B * 1e-12);
      const double x = golden_min(
          [&](double x) { return objective(x, (B - x) / (1 - r_dp)); }, lo, B,
          kRelTol, kMaxIter);
      consider(x, (B - x) / (1 - r_dp));
      // The optimum can sit on the branch boundary.
      consider(x_min, (B - x_min) / (1 - r_dp));
    }
  }

  // Branch B: the DP demand dominates (r_dp*y >= r_mp*x).
  // Constraint becomes (1-r_mp)*x + y = B.
  if (r_mp == 1.0) {
    if (r_dp > 0) consider(r_dp * B / r_mp, B);
  } else {
    const double x_max =
        r_mp > 0 ? B * r_dp / (r_mp + r_dp * (1 - r_mp)) : B / (1 - r_mp);
    if (x_max > 0) {
      const double hi = std::min(x_max, B / (1 - r_mp) * (1 - 1e-12));
      const double x = golden_min(
          [&](double x) { return objective(x, B - (1 - r_mp) * x); },
          hi * 1e-12, hi, kRelTol, kMaxIter);
      consider(x, B - (1 - r_mp) * x);
      consider(x_max, B - (1 - r_mp) * x_max);
    }
  }

  if (best_x < 0)
    throw std::runtime_error("bandwidth split search found no feasible point");

  SharedSplit split;
  split.bw_mp = best_x;
  split.bw_dp = best_y;
  split.bw_shared = std::max(r_mp * best_x, r_dp * best_y);
  return split;
}

namespace {

// Spread group_bw over the group's dims proportionally to their traffic.
void spread(std::vector<double>& per_dim, const std::vector<double>& traffic,
            const std::vector<int>& dim_indices, double group_bw) {
  double total = 0;
  for (int d : dim_indices) total += traffic[d - 1];
  assert(total > 0);
  for (int d : dim_indices) per_dim[d - 1] += group_bw * traffic[d - 1] / total;
}

}  // namespace

BwAllocation allocate(AllocScheme scheme, const Topology& t, const Workload& w,
                      const ParallelismMapping& mapping, double budget_gbps) {
  const int n = t.dim_count();
  if (scheme == AllocScheme::EqualBW) return equal_bw(budget_gbps, n);

  const TrafficBreakdown traffic = workload_traffic(t, w, mapping);
  std::vector<double> total(n);
  for (int i = 0; i < n; ++i) total[i] = traffic.mp[i] + traffic.dp[i];

  if (scheme == AllocScheme::MessageBW)
    return message_bw(budget_gbps, total);

  // SmartBW. With a single active phase there is nothing to split between,
  // so the proportional allocation is already optimal.
  const double m_mp = traffic.mp_total();
  const double m_dp = traffic.dp_total();
  if (m_mp <= 0 || m_dp <= 0) return message_bw(budget_gbps, total);

  BwAllocation alloc;
  alloc.budget_gbps = budget_gbps;
  alloc.per_dim_gbps.assign(n, 0.0);

  std::vector<int> mp_only, dp_only;
  for (const DimUse& u : mapping.mp_dims) mp_only.push_back(u.dim_index);
  for (const DimUse& u : mapping.dp_dims) dp_only.push_back(u.dim_index);

  if (!mapping.shared) {
    const GroupSplit split = smart_bw_unshared(budget_gbps, m_mp, m_dp);
    spread(alloc.per_dim_gbps, traffic.mp, mp_only, split.bw_mp);
    spread(alloc.per_dim_gbps, traffic.dp, dp_only, split.bw_dp);
  } else {
    const int s = mapping.shared->dim_index;
    const double r_mp = traffic.mp[s - 1] / m_mp;
    const double r_dp = traffic.dp[s - 1] / m_dp;
    const SharedSplit split =
        smart_bw_shared(budget_gbps, m_mp, m_dp, r_mp, r_dp);
    alloc.per_dim_gbps[s - 1] = split.bw_shared;
    if (!mp_only.empty())
      spread(alloc.per_dim_gbps, traffic.mp, mp_only,
             split.bw_mp * (1 - r_mp));
    if (!dp_only.empty())
      spread(alloc.per_dim_gbps, traffic.dp, dp_only,
             split.bw_dp * (1 - r_dp));
  }

  // The branch-boundary constraint can leave the sum a hair off the budget;
  // rescale so downstream validation sees an exact spend.
  const double sum = std::accumulate(alloc.per_dim_gbps.begin(),
                                     alloc.per_dim_gbps.end(), 0.0);
  assert(sum > 0);
  for (double& b : alloc.per_dim_gbps) b *= budget_gbps / sum;
  alloc.validate();
  return alloc;
}

}  // namespace hiernet
