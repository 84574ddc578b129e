/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#include "hiernet/Topology.hh"

#include <cassert>
#include <cctype>

#include "hiernet/Errors.hh"

namespace hiernet {

const char* block_kind_name(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::Ring:
      return "Ring";
    case BlockKind::FullyConnected:
      return "FC";
    case BlockKind::Switch:
      return "Switch";
  }
  assert(false && "[block_kind_name] unknown block kind");
  return "?";
}

bool operator==(const DimBlock& a, const DimBlock& b) noexcept {
  return a.kind == b.kind && a.size == b.size;
}

Topology::Topology(std::vector<DimBlock> dims, int max_dims)
    : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw ConfigError("topology must have at least one dimension");
  }
  if (max_dims >= 1 && dim_count() > max_dims) {
    throw ConfigError("topology has " + std::to_string(dim_count()) +
                      " dimensions, limit is " + std::to_string(max_dims));
  }
  for (int k = 0; k < dim_count(); k++) {
    if (dims_[k].size < 2) {
      throw ConfigError("dimension " + std::to_string(k + 1) +
                        " has size " + std::to_string(dims_[k].size) +
                        ", every dimension needs size >= 2");
    }
  }
}

const DimBlock& Topology::dim(int dim_index) const {
  assert(dim_index >= 1 && dim_index <= dim_count() &&
         "[Topology::dim] dim_index out of range");
  return dims_[dim_index - 1];
}

std::int64_t Topology::npu_count() const noexcept {
  std::int64_t count = 1;
  for (const auto& d : dims_) {
    count *= d.size;
  }
  return count;
}

std::string Topology::name() const {
  std::string out;
  for (int k = 0; k < dim_count(); k++) {
    if (k > 0) {
      out += '_';
    }
    out += block_kind_name(dims_[k].kind);
    out += '(';
    out += std::to_string(dims_[k].size);
    out += ')';
  }
  return out;
}

bool operator==(const Topology& a, const Topology& b) noexcept {
  return a.dims() == b.dims();
}

namespace {

[[noreturn]] void parse_fail(const std::string& spec, std::size_t pos,
                             const std::string& what) {
  throw ConfigError("topology \"" + spec + "\": " + what + " at position " +
                    std::to_string(pos));
}

}  // namespace

Topology parse_topology(const std::string& spec, int max_dims) {
  std::vector<DimBlock> dims;
  std::size_t pos = 0;

  while (true) {
    // block name
    std::size_t name_start = pos;
    while (pos < spec.size() && std::isalpha(static_cast<unsigned char>(spec[pos]))) {
      pos++;
    }
    std::string word = spec.substr(name_start, pos - name_start);
    BlockKind kind;
    if (word == "Ring") {
      kind = BlockKind::Ring;
    } else if (word == "FC" || word == "FullyConnected") {
      kind = BlockKind::FullyConnected;
    } else if (word == "Switch") {
      kind = BlockKind::Switch;
    } else if (word.empty()) {
      parse_fail(spec, name_start, "expected block name");
    } else {
      parse_fail(spec, name_start, "unknown block name \"" + word + "\"");
    }

    // "(" int ")"
    if (pos >= spec.size() || spec[pos] != '(') {
      parse_fail(spec, pos, "expected '('");
    }
    pos++;
    std::size_t digits_start = pos;
    long long size = 0;
    while (pos < spec.size() && std::isdigit(static_cast<unsigned char>(spec[pos]))) {
      size = size * 10 + (spec[pos] - '0');
      if (size > 1'000'000'000LL) {
        parse_fail(spec, digits_start, "group size out of range");
      }
      pos++;
    }
    if (pos == digits_start) {
      parse_fail(spec, pos, "expected group size");
    }
    if (pos >= spec.size() || spec[pos] != ')') {
      parse_fail(spec, pos, "expected ')'");
    }
    pos++;
    if (size < 2) {
      parse_fail(spec, digits_start,
                 "group size " + std::to_string(size) + " is below 2");
    }
    dims.push_back(DimBlock{kind, static_cast<int>(size)});

    if (pos == spec.size()) {
      break;
    }
    if (spec[pos] != '_') {
      parse_fail(spec, pos, "expected '_' or end of spec");
    }
    pos++;
  }

  return Topology(std::move(dims), max_dims);
}

std::string topology_name(const Topology& t) {
  return t.name();
}

}  // namespace hiernet
