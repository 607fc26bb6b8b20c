#pragma once

#include <cstdint>
#include <span>

namespace thetajoin {

// n-dimensional Hilbert curve over a grid of 2^eta cells per axis, using
// the transpose form of the Butz construction (Skilling, 2004) with a fixed
// axis order. Requires coords.size() * eta <= 62.
//
// Consecutive curve positions differ by exactly one unit step in exactly
// one coordinate, and every aligned block of 2^(n*l) positions covers an
// axis-aligned subcube of side 2^l.
std::uint64_t hilbert_index(std::span<const std::uint32_t> coords, unsigned eta);

// Inverse of hilbert_index; writes out.size() coordinates.
void hilbert_coords(std::uint64_t index, unsigned eta, std::span<std::uint32_t> out);

}  // namespace thetajoin
