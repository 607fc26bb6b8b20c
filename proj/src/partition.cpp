#include "thetajoin/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "thetajoin/errors.hpp"
#include "thetajoin/hilbert.hpp"

namespace thetajoin {

namespace mp = boost::multiprecision;

void CubeConfig::validate() const {
  if (dims() < 2) throw ParameterError("cube needs at least two relations");
  if (eta < 1 || eta > 31) throw ParameterError("cube resolution eta must be in [1, 31]");
  if (dims() * eta > 62) throw ParameterError("cube too large: dims * eta must be <= 62");
  for (auto c : cardinalities)
    if (c == 0) throw ParameterError("cube relation cardinality must be positive");
}

CubeConfig CubeConfig::for_cardinalities(std::vector<std::uint64_t> cardinalities, unsigned eta_max) {
  CubeConfig cfg;
  cfg.cardinalities = std::move(cardinalities);
  if (cfg.dims() < 2) throw ParameterError("cube needs at least two relations");
  if (cfg.dims() > kMaxCubeBits) throw ParameterError("too many relations for one cube");
  const std::uint64_t biggest = *std::max_element(cfg.cardinalities.begin(), cfg.cardinalities.end());
  unsigned eta = biggest <= 1 ? 1u : static_cast<unsigned>(std::bit_width(biggest - 1));
  eta = std::min({eta, eta_max, static_cast<unsigned>(kMaxCubeBits / cfg.dims()), 31u});
  cfg.eta = std::max(1u, eta);
  cfg.validate();
  return cfg;
}

std::uint32_t cell_of_tuple(std::uint64_t global_id, std::uint64_t cardinality, unsigned eta) {
  if (global_id < 1 || global_id > cardinality) throw ParameterError("global id out of range");
  const auto v = (static_cast<unsigned __int128>(global_id - 1) << eta) / cardinality;
  return static_cast<std::uint32_t>(v);
}

std::uint64_t tuples_in_cell(std::uint32_t cell, std::uint64_t cardinality, unsigned eta) {
  // ids g with floor((g-1) 2^eta / N) == c are those with
  // ceil(c N / 2^eta) <= g-1 < ceil((c+1) N / 2^eta).
  const unsigned __int128 side = static_cast<unsigned __int128>(1) << eta;
  auto ceil_div = [&](unsigned __int128 x) { return (x + side - 1) / side; };
  const auto lo = ceil_div(static_cast<unsigned __int128>(cell) * cardinality);
  const auto hi = ceil_div(static_cast<unsigned __int128>(cell + 1) * cardinality);
  return static_cast<std::uint64_t>(hi - lo);
}

std::uint64_t segment_begin(std::uint64_t j, std::uint64_t k, std::uint64_t cells) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(j) * cells / k);
}

namespace {

void check_k(const CubeConfig& config, std::uint64_t k_r) {
  config.validate();
  if (k_r < 1 || k_r > config.cell_count())
    throw ParameterError("k_r must lie in [1, 2^(eta*dims)]");
}

// Union of the extents of the maximal aligned blocks tiling [a, b).
void extents_of_range(const CubeConfig& config, std::uint64_t a, std::uint64_t b, Extent* out) {
  const std::size_t m = config.dims();
  std::vector<std::uint32_t> coords(m);
  bool first = true;
  while (a < b) {
    unsigned l = 0;
    while (l < config.eta) {
      const unsigned bits = static_cast<unsigned>(m) * (l + 1);
      const std::uint64_t size = std::uint64_t{1} << bits;
      if ((a & (size - 1)) != 0 || b - a < size) break;
      ++l;
    }
    hilbert_coords(a, config.eta, coords);
    const std::uint32_t mask = (std::uint32_t{1} << l) - 1;
    for (std::size_t d = 0; d < m; ++d) {
      const std::uint32_t lo = coords[d] & ~mask;
      const std::uint32_t hi = lo | mask;
      if (first) {
        out[d] = {lo, hi};
      } else {
        out[d].lo = std::min(out[d].lo, lo);
        out[d].hi = std::max(out[d].hi, hi);
      }
    }
    first = false;
    a += std::uint64_t{1} << (m * l);
  }
}

std::vector<std::vector<std::uint64_t>> cell_prefix_sums(const CubeConfig& config) {
  std::vector<std::vector<std::uint64_t>> prefix(config.dims());
  const std::uint32_t side = config.cells_per_axis();
  for (std::size_t d = 0; d < config.dims(); ++d) {
    auto& p = prefix[d];
    p.assign(side + 1, 0);
    for (std::uint32_t c = 0; c < side; ++c)
      p[c + 1] = p[c] + tuples_in_cell(c, config.cardinalities[d], config.eta);
  }
  return prefix;
}

mp::cpp_rational exact(double x) {
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  mp::cpp_rational r(scaled);
  exp -= 53;
  if (exp >= 0)
    r *= mp::cpp_rational(mp::cpp_int(1) << exp);
  else
    r /= mp::cpp_rational(mp::cpp_int(1) << -exp);
  return r;
}

}  // namespace

std::vector<Extent> segment_extents(const CubeConfig& config, std::uint64_t k_r) {
  check_k(config, k_r);
  const std::size_t m = config.dims();
  const std::uint64_t cells = config.cell_count();
  std::vector<Extent> out(k_r * m);
  for (std::uint64_t j = 0; j < k_r; ++j)
    extents_of_range(config, segment_begin(j, k_r, cells), segment_begin(j + 1, k_r, cells), &out[j * m]);
  return out;
}

PartitionAssignment::PartitionAssignment(CubeConfig config, std::uint64_t k_r)
    : config_(std::move(config)), k_r_(k_r) {
  check_k(config_, k_r_);
  const std::uint64_t cells = config_.cell_count();
  boundaries_.resize(k_r_ + 1);
  for (std::uint64_t j = 0; j <= k_r_; ++j) boundaries_[j] = segment_begin(j, k_r_, cells);
  extents_ = segment_extents(config_, k_r_);

  const std::size_t m = dims();
  const std::uint32_t side = config_.cells_per_axis();
  offsets_.assign(m, std::vector<std::uint32_t>(side + 1, 0));
  ids_.assign(m, {});
  for (std::size_t d = 0; d < m; ++d) {
    auto& off = offsets_[d];
    for (std::uint64_t j = 0; j < k_r_; ++j) {
      const auto& e = extent(j, d);
      ++off[e.lo];
      --off[e.hi + 1];  // difference array, fixed up below
    }
    // Turn the difference array into per-cell counts, then into offsets.
    std::vector<std::uint32_t> count(side);
    std::int64_t running = 0;
    for (std::uint32_t c = 0; c < side; ++c) {
      running += static_cast<std::int32_t>(off[c]);
      count[c] = static_cast<std::uint32_t>(running);
    }
    off[0] = 0;
    for (std::uint32_t c = 0; c < side; ++c) off[c + 1] = off[c] + count[c];
    auto& ids = ids_[d];
    ids.resize(off[side]);
    std::vector<std::uint32_t> cursor(off.begin(), off.end() - 1);
    for (std::uint64_t j = 0; j < k_r_; ++j) {
      const auto& e = extent(j, d);
      for (std::uint32_t c = e.lo; c <= e.hi; ++c) ids[cursor[c]++] = static_cast<std::uint32_t>(j);
    }
  }
}

std::uint64_t PartitionAssignment::component_of_position(std::uint64_t position) const {
  if (position >= config_.cell_count()) throw ParameterError("curve position out of range");
  // Largest j with floor(j * L / k) <= p is floor(((p + 1) k - 1) / L).
  const auto v = (static_cast<unsigned __int128>(position + 1) * k_r_ - 1) / config_.cell_count();
  return static_cast<std::uint64_t>(v);
}

std::uint64_t PartitionAssignment::owner_of_cell(std::span<const std::uint32_t> coords) const {
  if (coords.size() != dims()) throw ParameterError("cell has wrong dimensionality");
  return component_of_position(hilbert_index(coords, config_.eta));
}

std::span<const std::uint32_t> PartitionAssignment::components_for_cell(std::size_t dim,
                                                                         std::uint32_t cell) const {
  if (dim >= dims() || cell >= config_.cells_per_axis()) throw ParameterError("cell out of range");
  const auto& off = offsets_[dim];
  return std::span<const std::uint32_t>(ids_[dim]).subspan(off[cell], off[cell + 1] - off[cell]);
}

std::span<const std::uint32_t> PartitionAssignment::components_for_tuple(std::size_t dim,
                                                                          std::uint64_t global_id) const {
  if (dim >= dims()) throw ParameterError("dimension out of range");
  return components_for_cell(dim, cell_of_tuple(global_id, config_.cardinalities[dim], config_.eta));
}

PartitionAssignment build_partition(const CubeConfig& config, std::uint64_t k_r) {
  return PartitionAssignment(config, k_r);
}

std::uint64_t ScoreReport::cnt(const CubeConfig& config, std::size_t dim, std::uint64_t global_id) const {
  return cnt_by_cell.at(dim).at(cell_of_tuple(global_id, config.cardinalities.at(dim), config.eta));
}

ScoreReport partition_score(const PartitionAssignment& pa) {
  const auto& cfg = pa.config();
  ScoreReport r;
  r.cnt_by_cell.resize(cfg.dims());
  r.per_dim_sums.assign(cfg.dims(), 0);
  for (std::size_t d = 0; d < cfg.dims(); ++d) {
    auto& cnt = r.cnt_by_cell[d];
    cnt.resize(cfg.cells_per_axis());
    for (std::uint32_t c = 0; c < cfg.cells_per_axis(); ++c) {
      cnt[c] = pa.components_for_cell(d, c).size();
      r.per_dim_sums[d] += cnt[c] * tuples_in_cell(c, cfg.cardinalities[d], cfg.eta);
    }
    r.score += r.per_dim_sums[d];
  }
  return r;
}

std::uint64_t score_from_extents(const CubeConfig& config, std::uint64_t k_r, std::span<const Extent> extents) {
  const auto prefix = cell_prefix_sums(config);
  const std::size_t m = config.dims();
  if (extents.size() != k_r * m) throw ParameterError("extent table has wrong size");
  std::uint64_t score = 0;
  for (std::uint64_t j = 0; j < k_r; ++j)
    for (std::size_t d = 0; d < m; ++d) {
      const auto& e = extents[j * m + d];
      score += prefix[d][e.hi + 1] - prefix[d][e.lo];
    }
  return score;
}

int alignment_level(const CubeConfig& config, std::uint64_t k_r) {
  if (k_r == 0 || !std::has_single_bit(k_r)) return -1;
  const auto bits = static_cast<unsigned>(std::countr_zero(k_r));
  if (bits % config.dims() != 0) return -1;
  const unsigned l = bits / static_cast<unsigned>(config.dims());
  return l <= config.eta ? static_cast<int>(l) : -1;
}

DuplicationFactor duplication_factor(const CubeConfig& config, std::uint64_t k_r, std::size_t dim) {
  check_k(config, k_r);
  if (dim >= config.dims()) throw ParameterError("dimension out of range");
  const int l = alignment_level(config, k_r);
  if (l >= 0) {
    // eps = 2^-l along each of the other dims-1 axes.
    const double eps = std::ldexp(1.0, -l);
    return {std::pow(1.0 / eps, static_cast<double>(config.dims() - 1)), true};
  }
  const auto report = partition_score(build_partition(config, k_r));
  return {static_cast<double>(report.per_dim_sums[dim]) / static_cast<double>(config.cardinalities[dim]), false};
}

KrChoice choose_k_r(const CubeConfig& config, double lambda, std::uint64_t k_max) {
  config.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (k_max < 1) throw ParameterError("k_max must be at least 1");
  const std::uint64_t upper = std::min(k_max, config.cell_count());

  mp::cpp_int product = 1;
  for (auto c : config.cardinalities) product *= c;
  const mp::cpp_rational lam = exact(lambda);
  const mp::cpp_rational rest = mp::cpp_rational(1) - lam;

  const auto prefix = cell_prefix_sums(config);
  const std::size_t m = config.dims();
  KrChoice out;
  mp::cpp_rational best;
  for (std::uint64_t k = 1; k <= upper; ++k) {
    const auto ext = segment_extents(config, k);
    std::uint64_t score = 0;
    for (std::uint64_t j = 0; j < k; ++j)
      for (std::size_t d = 0; d < m; ++d) score += prefix[d][ext[j * m + d].hi + 1] - prefix[d][ext[j * m + d].lo];
    const mp::cpp_rational delta = lam * mp::cpp_rational(score) + rest * mp::cpp_rational(product, k);
    out.sweep.push_back({k, score, static_cast<double>(delta)});
    if (k == 1 || delta < best) {
      best = delta;
      out.k_r = k;
    }
  }
  return out;
}

}  // namespace thetajoin
