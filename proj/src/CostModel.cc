/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/CostModel.hh"

#include <stdexcept>

namespace hiernet {

CostBreakdown network_cost(const Topology& t,
                           const std::vector<double>& per_dim_gbps,
                           const UnitCosts& costs) {
  if (static_cast<int>(per_dim_gbps.size()) != t.dim_count())
    throw std::invalid_argument("bandwidth vector size != dimension count");

  CostBreakdown out;
  const double npus = static_cast<double>(t.npu_count());
  for (int k = 1; k <= t.dim_count(); ++k) {
    const double bw = per_dim_gbps[k - 1];
    if (bw < 0) throw std::invalid_argument("negative bandwidth");
    if (bw == 0) continue;

    out.link_usd += npus * bw * costs.link_per_gbps;
    if (t.dim(k).kind == BlockKind::Switch) {
      const double radix = static_cast<double>(t.dim(k).size);
      const double switches = npus / radix;
      out.nic_usd += npus * bw * costs.nic_per_gbps;
      // Switch cost scales with radix * per-port bandwidth.
      out.switch_usd += switches * radix * bw * costs.switch_per_radix_gbps;
    }
  }
  return out;
}

double perf_per_cost(double iteration_time, double total_cost_usd) {
  if (iteration_time <= 0) throw std::invalid_argument("iteration_time <= 0");
  if (total_cost_usd <= 0) throw std::invalid_argument("total_cost <= 0");
  return 1.0 / (iteration_time * total_cost_usd);
}

}  // namespace hiernet
