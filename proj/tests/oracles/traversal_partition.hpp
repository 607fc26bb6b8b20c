#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "thetajoin/partition.hpp"

namespace oracle {

// Partition built by walking every cell of the curve in order and recording,
// per (dimension, coordinate), which components visited it.
struct TraversalPartition {
  std::vector<std::uint64_t> owner;                    // by curve position
  std::vector<std::vector<std::set<std::uint32_t>>> lookup;  // [dim][cell]
  std::vector<std::vector<std::uint32_t>> cells;        // coords by position
};

TraversalPartition traverse_partition(const thetajoin::CubeConfig& config, std::uint64_t k_r);

// Partition score counted tuple by tuple.
std::uint64_t traversal_score(const thetajoin::CubeConfig& config, const TraversalPartition& tp);

}  // namespace oracle
