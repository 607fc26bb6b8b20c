#include <random>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "oracles/traversal_partition.hpp"
#include "thetajoin/errors.hpp"
#include "thetajoin/hilbert.hpp"
#include "thetajoin/partition.hpp"

using namespace thetajoin;

namespace {

CubeConfig cube(std::vector<std::uint64_t> cards, unsigned eta) {
  CubeConfig c{std::move(cards), eta};
  c.validate();
  return c;
}

void check_against_traversal(const CubeConfig& cfg, std::uint64_t k) {
  CAPTURE(cfg.dims());
  CAPTURE(cfg.eta);
  CAPTURE(k);
  const auto pa = build_partition(cfg, k);
  const auto tp = oracle::traverse_partition(cfg, k);
  for (std::uint64_t pos = 0; pos < cfg.cell_count(); ++pos) {
    REQUIRE(pa.component_of_position(pos) == tp.owner[pos]);
    REQUIRE(pa.owner_of_cell(tp.cells[pos]) == tp.owner[pos]);
  }
  for (std::size_t d = 0; d < cfg.dims(); ++d)
    for (std::uint32_t c = 0; c < cfg.cells_per_axis(); ++c) {
      auto got = pa.components_for_cell(d, c);
      const std::vector<std::uint32_t> want(tp.lookup[d][c].begin(), tp.lookup[d][c].end());
      REQUIRE(std::vector<std::uint32_t>(got.begin(), got.end()) == want);
    }
  CHECK(partition_score(pa).score == oracle::traversal_score(cfg, tp));
}

}  // namespace

TEST_CASE("cell of tuple") {
  CHECK(cell_of_tuple(1, 10, 2) == 0);
  CHECK(cell_of_tuple(10, 10, 2) == 3);
  for (std::uint64_t g = 1; g <= 4; ++g) CHECK(cell_of_tuple(g, 4, 2) == g - 1);
  CHECK_THROWS_AS(cell_of_tuple(0, 4, 2), ParameterError);
  CHECK_THROWS_AS(cell_of_tuple(5, 4, 2), ParameterError);
}

TEST_CASE("tuples per cell sum to the cardinality and agree with cell_of_tuple") {
  for (unsigned eta = 1; eta <= 4; ++eta)
    for (std::uint64_t n = 1; n <= 40; ++n) {
      std::vector<std::uint64_t> count(1u << eta, 0);
      for (std::uint64_t g = 1; g <= n; ++g) ++count[cell_of_tuple(g, n, eta)];
      for (std::uint32_t c = 0; c < (1u << eta); ++c) CHECK(tuples_in_cell(c, n, eta) == count[c]);
    }
}

TEST_CASE("eta selection") {
  CHECK(CubeConfig::for_cardinalities({4, 4}).eta == 2);
  CHECK(CubeConfig::for_cardinalities({5, 2}).eta == 3);
  CHECK(CubeConfig::for_cardinalities({1, 1}).eta == 1);
  CHECK(CubeConfig::for_cardinalities({1000000, 10}).eta == 12);
  CHECK(CubeConfig::for_cardinalities({200, 200, 200}).eta == 8);
  CHECK(CubeConfig::for_cardinalities({200, 200, 200, 200, 200, 200}).eta == 4);
  CHECK(CubeConfig::for_cardinalities({200, 200}, 3).eta == 3);
  CHECK_THROWS_AS(CubeConfig::for_cardinalities({5}), ParameterError);
  CHECK_THROWS_AS(cube({0, 3}, 1), ParameterError);
  CHECK_THROWS_AS(cube({3, 3}, 32), ParameterError);
}

TEST_CASE("single component owns everything") {
  const auto cfg = cube({4, 7, 3}, 2);
  const auto pa = build_partition(cfg, 1);
  for (std::size_t d = 0; d < 3; ++d)
    for (std::uint32_t c = 0; c < 4; ++c) {
      auto ids = pa.components_for_cell(d, c);
      REQUIRE(ids.size() == 1);
      CHECK(ids[0] == 0);
    }
  CHECK(partition_score(pa).score == 14);
  for (std::size_t d = 0; d < 3; ++d) CHECK(duplication_factor(cfg, 1, d).factor == 1.0);
}

TEST_CASE("four quadrants on a 4x4 cube") {
  const auto cfg = cube({4, 4}, 2);
  const auto pa = build_partition(cfg, 4);
  for (std::uint64_t j = 0; j < 4; ++j)
    for (std::size_t d = 0; d < 2; ++d) {
      const auto& e = pa.extent(j, d);
      CHECK(e.hi - e.lo == 1);
      CHECK(e.lo % 2 == 0);
    }
  for (std::size_t d = 0; d < 2; ++d)
    for (std::uint32_t c = 0; c < 4; ++c) CHECK(pa.components_for_cell(d, c).size() == 2);
  for (std::uint64_t g = 1; g <= 4; ++g) CHECK(pa.components_for_tuple(0, g).size() == 2);
  const auto report = partition_score(pa);
  CHECK(report.score == 16);
  CHECK(report.per_dim_sums == std::vector<std::uint64_t>{8, 8});
  CHECK(report.cnt(cfg, 1, 3) == 2);
  const auto dup = duplication_factor(cfg, 4, 0);
  CHECK(dup.aligned);
  CHECK(dup.factor == 2.0);
}

TEST_CASE("singleton components") {
  const auto cfg = cube({4, 4}, 2);
  const auto pa = build_partition(cfg, 16);
  for (std::size_t d = 0; d < 2; ++d)
    for (std::uint32_t c = 0; c < 4; ++c) CHECK(pa.components_for_cell(d, c).size() == 4);
  const auto cfg3 = cube({2, 2, 2}, 1);
  const auto pa3 = build_partition(cfg3, 8);
  for (std::size_t d = 0; d < 3; ++d)
    for (std::uint32_t c = 0; c < 2; ++c) CHECK(pa3.components_for_cell(d, c).size() == 4);
}

TEST_CASE("eight subcubes of a 2x2x2 cube") {
  const auto cfg = cube({6, 6, 6}, 1);
  for (std::size_t d = 0; d < 3; ++d) {
    const auto dup = duplication_factor(cfg, 8, d);
    CHECK(dup.aligned);
    CHECK(dup.factor == 4.0);
    const auto report = partition_score(build_partition(cfg, 8));
    CHECK(static_cast<double>(report.per_dim_sums[d]) / 6.0 == dup.factor);
  }
}

TEST_CASE("closed-form duplication equals measured mean for aligned splits") {
  for (auto [dims, eta] : {std::pair{2u, 3u}, {3u, 2u}, {4u, 1u}, {2u, 4u}}) {
    std::vector<std::uint64_t> cards(dims);
    for (std::size_t i = 0; i < dims; ++i) cards[i] = 5 + 7 * i;
    const auto cfg = cube(cards, eta);
    for (unsigned l = 0; l <= eta; ++l) {
      const std::uint64_t k = std::uint64_t{1} << (dims * l);
      const auto report = partition_score(build_partition(cfg, k));
      for (std::size_t d = 0; d < dims; ++d) {
        const auto dup = duplication_factor(cfg, k, d);
        CHECK(dup.aligned);
        CHECK(dup.factor == static_cast<double>(report.per_dim_sums[d]) / static_cast<double>(cards[d]));
      }
    }
  }
}

TEST_CASE("unaligned duplication falls back to the measured mean") {
  const auto cfg = cube({8, 8}, 3);
  const auto dup = duplication_factor(cfg, 3, 0);
  CHECK_FALSE(dup.aligned);
  const auto report = partition_score(build_partition(cfg, 3));
  CHECK(dup.factor == static_cast<double>(report.per_dim_sums[0]) / 8.0);
  CHECK(alignment_level(cfg, 4) == 1);
  CHECK(alignment_level(cfg, 8) == -1);
  CHECK(alignment_level(cfg, 128) == -1);
}

TEST_CASE("analytic lookup matches a full curve traversal") {
  for (unsigned eta = 1; eta <= 4; ++eta)
    for (std::uint64_t k = 1; k <= (1u << (2 * eta)); k += (eta < 3 ? 1 : 7)) check_against_traversal(cube({9, 13}, eta), k);
  for (unsigned eta = 1; eta <= 3; ++eta)
    for (std::uint64_t k : {1, 2, 3, 5, 8, 11, 27, 64}) {
      if (k > (std::uint64_t{1} << (3 * eta))) continue;
      check_against_traversal(cube({5, 12, 30}, eta), k);
    }
  check_against_traversal(cube({3, 4, 5, 6}, 2), 37);
}

TEST_CASE("segments are contiguous, cover the curve, and differ by at most one") {
  for (std::uint64_t cells : {4ull, 16ull, 64ull, 512ull})
    for (std::uint64_t k = 1; k <= cells; ++k) {
      std::uint64_t lo = cells, hi = 0;
      CHECK(segment_begin(0, k, cells) == 0);
      CHECK(segment_begin(k, k, cells) == cells);
      for (std::uint64_t j = 0; j < k; ++j) {
        const auto len = segment_begin(j + 1, k, cells) - segment_begin(j, k, cells);
        lo = std::min(lo, len);
        hi = std::max(hi, len);
      }
      CHECK(hi - lo <= 1);
    }
}

TEST_CASE("every combination meets in exactly the component owning its cell") {
  const auto cfg = cube({7, 5, 9}, 2);
  for (std::uint64_t k : {1, 3, 8, 13}) {
    const auto pa = build_partition(cfg, k);
    std::vector<std::uint32_t> cell(3);
    for (std::uint64_t a = 1; a <= 7; ++a)
      for (std::uint64_t b = 1; b <= 5; ++b)
        for (std::uint64_t c = 1; c <= 9; ++c) {
          const std::uint64_t ids[3] = {a, b, c};
          for (std::size_t d = 0; d < 3; ++d) cell[d] = cell_of_tuple(ids[d], cfg.cardinalities[d], cfg.eta);
          const auto owner = pa.owner_of_cell(cell);
          for (std::size_t d = 0; d < 3; ++d) {
            auto comps = pa.components_for_tuple(d, ids[d]);
            REQUIRE(std::binary_search(comps.begin(), comps.end(), static_cast<std::uint32_t>(owner)));
          }
        }
  }
}

TEST_CASE("k_r bounds") {
  const auto cfg = cube({4, 4}, 2);
  CHECK_THROWS_AS(build_partition(cfg, 0), ParameterError);
  CHECK_THROWS_AS(build_partition(cfg, 17), ParameterError);
}

namespace {

namespace mp = boost::multiprecision;

std::uint64_t sweep_argmin(const CubeConfig& cfg, mp::cpp_rational lambda, std::uint64_t k_max) {
  mp::cpp_int product = 1;
  for (auto c : cfg.cardinalities) product *= c;
  std::uint64_t best_k = 0;
  mp::cpp_rational best;
  const std::uint64_t upper = std::min<std::uint64_t>(k_max, cfg.cell_count());
  for (std::uint64_t k = 1; k <= upper; ++k) {
    const auto score = oracle::traversal_score(cfg, oracle::traverse_partition(cfg, k));
    const mp::cpp_rational delta = lambda * score + (1 - lambda) * mp::cpp_rational(product, k);
    if (best_k == 0 || delta < best) {
      best = delta;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace

TEST_CASE("k_r choice at the extremes of lambda") {
  const auto cfg = cube({30, 40}, 3);
  CHECK(choose_k_r(cfg, 1.0, 16).k_r == 1);
  CHECK(choose_k_r(cfg, 0.0, 16).k_r == 16);
  CHECK(choose_k_r(cfg, 0.0, 1000).k_r == 64);
  CHECK_THROWS_AS(choose_k_r(cfg, 1.5, 16), ParameterError);
  CHECK_THROWS_AS(choose_k_r(cfg, 0.4, 0), ParameterError);
}

TEST_CASE("k_r choice matches an exhaustive sweep") {
  const auto cfg = cube({64, 64}, 3);
  // 0.4 as a double is exactly 3602879701896397 / 2^53.
  const mp::cpp_rational exact(mp::cpp_int(3602879701896397), mp::cpp_int(1) << 53);
  CHECK(static_cast<double>(exact) == 0.4);
  const auto choice = choose_k_r(cfg, 0.4, 16);
  CHECK(choice.k_r == sweep_argmin(cfg, exact, 16));
  CHECK(choice.sweep.size() == 16);
  for (const auto& p : choice.sweep)
    CHECK(p.score == oracle::traversal_score(cfg, oracle::traverse_partition(cfg, p.k_r)));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dims = 2 + rng() % 2;
    std::vector<std::uint64_t> cards(dims);
    for (auto& c : cards) c = 1 + rng() % 60;
    const unsigned eta = 1 + static_cast<unsigned>(rng() % 3);
    const auto c = cube(cards, eta);
    const std::uint64_t k_max = 1 + rng() % 32;
    CHECK(choose_k_r(c, 0.4, k_max).k_r == sweep_argmin(c, exact, k_max));
  }
}
