/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiernet {

// Network building blocks usable at each dimension of the hierarchy.
enum class BlockKind { Ring, FullyConnected, Switch };

// Canonical short name: "Ring", "FC", "Switch".
const char* block_kind_name(BlockKind kind) noexcept;

struct DimBlock {
  BlockKind kind;
  int size;  // NPUs per group in this dimension, >= 2
};

bool operator==(const DimBlock& a, const DimBlock& b) noexcept;

// An N-dimensional hierarchical topology. dims()[0] is Dim 1, the innermost
// (fastest, typically highest-BW) dimension. Homogeneous NPU endpoints; every
// NPU participates in exactly one group per dimension.
class Topology {
 public:
  static constexpr int kDefaultMaxDims = 4;

  Topology() = default;
  explicit Topology(std::vector<DimBlock> dims,
                    int max_dims = kDefaultMaxDims);

  const std::vector<DimBlock>& dims() const noexcept { return dims_; }
  int dim_count() const noexcept { return static_cast<int>(dims_.size()); }
  const DimBlock& dim(int dim_index) const;  // 1-based
  std::int64_t npu_count() const noexcept;
  std::string name() const;

 private:
  std::vector<DimBlock> dims_;
};

bool operator==(const Topology& a, const Topology& b) noexcept;

// Parses "Block(int)" joined by "_", e.g. "Ring(2)_FC(8)_Ring(8)_Switch(8)".
// Accepted block names: Ring, FC, FullyConnected, Switch ("FullyConnected"
// normalizes to FC in the canonical name). Throws ConfigError with the
// character position on syntax errors, unknown block names, sizes < 2, or
// more than max_dims dimensions.
Topology parse_topology(const std::string& spec,
                        int max_dims = Topology::kDefaultMaxDims);

// Canonical printable name; parse_topology(topology_name(t)) == t.
std::string topology_name(const Topology& t);

}  // namespace hiernet
