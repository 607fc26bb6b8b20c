#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "thetajoin/cost_model.hpp"

namespace thetajoin {

// Pool-adjacent-violators: the non-decreasing sequence closest to `y` in
// weighted least squares. Empty weights mean all ones.
std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> weights = {});

struct CalibrationOptions {
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
  bool quick = false;           // three knots per table, one pass each
  std::size_t repeats = 5;      // median of this many passes otherwise
  std::uint64_t map_slots = 1;
  std::uint64_t block_size = 64ull << 20;
};

struct CalibrationRun {
  Profile profile;
  std::vector<std::uint64_t> spill_sizes;   // bytes
  std::vector<double> write_seconds_per_byte;  // raw medians
  std::vector<std::uint64_t> fanouts;       // connection counts
  std::vector<double> connection_seconds;   // raw medians per connection
  double read_seconds_per_byte = 0.0;
  double copy_seconds_per_byte = 0.0;
};

// Sequential file writes over growing spill sizes give c1 (read back) and
// p; loopback TCP transfers give c2 and, over growing connection counts, q.
// Throws Error when the scratch directory lacks space or the clock is too
// coarse to time the probes.
CalibrationRun calibrate(const CalibrationOptions& options);

}  // namespace thetajoin
