#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thetajoin {

// The cross-product hypercube of one job: one axis per relation, 2^eta
// cells per axis. Tuple global ids 1..|R_i| are spread evenly over cells.
struct CubeConfig {
  std::vector<std::uint64_t> cardinalities;
  unsigned eta = 1;

  std::size_t dims() const { return cardinalities.size(); }
  std::uint32_t cells_per_axis() const { return std::uint32_t{1} << eta; }
  std::uint64_t cell_count() const { return std::uint64_t{1} << (eta * dims()); }

  // Throws ParameterError unless dims >= 2, eta >= 1, dims*eta <= 62 and
  // every cardinality is positive.
  void validate() const;

  // eta = ceil(log2(max |R_i|)), at least 1, capped by eta_max and so that
  // the cube has at most 2^24 cells.
  static CubeConfig for_cardinalities(std::vector<std::uint64_t> cardinalities,
                                      unsigned eta_max = 31);
};

inline constexpr unsigned kMaxCubeBits = 24;

// floor((global_id - 1) * 2^eta / cardinality). Throws ParameterError when
// global_id is outside [1, cardinality].
std::uint32_t cell_of_tuple(std::uint64_t global_id, std::uint64_t cardinality, unsigned eta);

// Number of global ids in [1, cardinality] that fall in `cell`.
std::uint64_t tuples_in_cell(std::uint32_t cell, std::uint64_t cardinality, unsigned eta);

// Inclusive coordinate range a component touches along one axis. A curve
// segment is connected and moves one unit step at a time, so its
// projection onto any axis is an interval.
struct Extent {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  bool contains(std::uint32_t c) const { return lo <= c && c <= hi; }
};

// Per-component extents for an equal-length split of the curve into k_r
// segments, laid out [component * dims + dim]. Computed from the aligned
// sub-blocks of each segment, without walking the curve.
std::vector<Extent> segment_extents(const CubeConfig& config, std::uint64_t k_r);

// First curve position of segment j when [0, cells) is cut into k equal
// (+-1) contiguous segments.
std::uint64_t segment_begin(std::uint64_t j, std::uint64_t k, std::uint64_t cells);

class PartitionAssignment {
 public:
  PartitionAssignment(CubeConfig config, std::uint64_t k_r);

  const CubeConfig& config() const { return config_; }
  std::uint64_t k_r() const { return k_r_; }
  std::size_t dims() const { return config_.dims(); }

  // k_r + 1 curve positions; component j owns [boundaries[j], boundaries[j+1]).
  const std::vector<std::uint64_t>& boundaries() const { return boundaries_; }
  std::uint64_t component_of_position(std::uint64_t position) const;
  std::uint64_t owner_of_cell(std::span<const std::uint32_t> coords) const;

  const Extent& extent(std::uint64_t component, std::size_t dim) const {
    return extents_[component * dims() + dim];
  }

  // Sorted ids of the components containing at least one cell whose
  // coordinate along `dim` equals `cell`.
  std::span<const std::uint32_t> components_for_cell(std::size_t dim, std::uint32_t cell) const;
  std::span<const std::uint32_t> components_for_tuple(std::size_t dim, std::uint64_t global_id) const;

 private:
  CubeConfig config_;
  std::uint64_t k_r_;
  std::vector<std::uint64_t> boundaries_;
  std::vector<Extent> extents_;
  // CSR per dimension: offsets_[dim][cell]..offsets_[dim][cell+1] into ids_[dim].
  std::vector<std::vector<std::uint32_t>> offsets_;
  std::vector<std::vector<std::uint32_t>> ids_;
};

// Throws ParameterError unless 1 <= k_r <= cell_count().
PartitionAssignment build_partition(const CubeConfig& config, std::uint64_t k_r);

struct ScoreReport {
  // cnt_by_cell[dim][cell]: Cnt(t, C) shared by every tuple in that cell.
  std::vector<std::vector<std::uint64_t>> cnt_by_cell;
  std::vector<std::uint64_t> per_dim_sums;
  std::uint64_t score = 0;

  std::uint64_t cnt(const CubeConfig& config, std::size_t dim, std::uint64_t global_id) const;
};

// Exact partition score: sum over dims and cells of tuples-in-cell times the
// number of components containing that cell value.
ScoreReport partition_score(const PartitionAssignment& pa);

// Same quantity from extents alone; used by the k_R sweep.
std::uint64_t score_from_extents(const CubeConfig& config, std::uint64_t k_r,
                                 std::span<const Extent> extents);

struct DuplicationFactor {
  double factor = 1.0;
  // True when k_r = 2^(dims*l) for some 0 <= l <= eta, so every component
  // is a subcube and the closed form applies. Otherwise `factor` is the
  // measured mean Cnt of the dimension.
  bool aligned = true;
};

// Expected copies per tuple of relation `dim`. For aligned k_r each
// component spans a fraction eps = 2^-l of every axis, so a tuple lands in
// prod_{j != dim} 1/eps components.
DuplicationFactor duplication_factor(const CubeConfig& config, std::uint64_t k_r, std::size_t dim);

// Recursion level l with k_r = 2^(dims*l), or -1 when k_r is not aligned.
int alignment_level(const CubeConfig& config, std::uint64_t k_r);

struct DeltaPoint {
  std::uint64_t k_r = 0;
  std::uint64_t score = 0;
  double delta = 0.0;
};

struct KrChoice {
  std::uint64_t k_r = 1;
  std::vector<DeltaPoint> sweep;
};

// argmin over integer k in [1, min(k_max, cells)] of
//   lambda * Score(k) + (1 - lambda) * prod |R_i| / k,
// compared in exact rational arithmetic, ties broken toward smaller k.
KrChoice choose_k_r(const CubeConfig& config, double lambda, std::uint64_t k_max);

inline constexpr double kDefaultLambda = 0.4;

}  // namespace thetajoin
