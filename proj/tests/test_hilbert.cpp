#include <array>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles/hamilton_hilbert.hpp"
#include "thetajoin/errors.hpp"
#include "thetajoin/hilbert.hpp"

using namespace thetajoin;

namespace {

std::vector<std::vector<std::uint32_t>> walk(std::size_t dims, unsigned eta) {
  const std::uint64_t cells = std::uint64_t{1} << (dims * eta);
  std::vector<std::vector<std::uint32_t>> out(cells, std::vector<std::uint32_t>(dims));
  for (std::uint64_t h = 0; h < cells; ++h) hilbert_coords(h, eta, out[h]);
  return out;
}

int manhattan(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] > b[i] ? int(a[i] - b[i]) : int(b[i] - a[i]);
  return d;
}

}  // namespace

TEST_CASE("first order 2-D curve visits the four cells by unit steps") {
  auto cells = walk(2, 1);
  std::set<std::vector<std::uint32_t>> seen(cells.begin(), cells.end());
  CHECK(seen.size() == 4);
  for (std::size_t i = 1; i < cells.size(); ++i) CHECK(manhattan(cells[i - 1], cells[i]) == 1);
}

TEST_CASE("16-cell order matches the Gray-code oracle") {
  for (std::uint32_t x = 0; x < 4; ++x)
    for (std::uint32_t y = 0; y < 4; ++y) {
      const std::vector<std::uint32_t> c{x, y};
      CHECK(hilbert_index(c, 2) == oracle::hamilton_index(c, 2));
    }
  const std::vector<std::array<std::uint32_t, 2>> order{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 2}, {0, 3}, {1, 3}, {1, 2},
                                                        {2, 2}, {2, 3}, {3, 3}, {3, 2}, {3, 1}, {2, 1}, {2, 0}, {3, 0}};
  auto cells = walk(2, 2);
  for (std::size_t h = 0; h < 16; ++h) {
    CHECK(cells[h][0] == order[h][0]);
    CHECK(cells[h][1] == order[h][1]);
  }
}

TEST_CASE("2-D agrees with the oracle at eta 3 and 4") {
  for (unsigned eta : {3u, 4u}) {
    const std::uint32_t side = 1u << eta;
    for (std::uint32_t x = 0; x < side; ++x)
      for (std::uint32_t y = 0; y < side; ++y) {
        const std::vector<std::uint32_t> c{x, y};
        REQUIRE(hilbert_index(c, eta) == oracle::hamilton_index(c, eta));
      }
  }
}

TEST_CASE("inverse round trips for m=3, eta=2") {
  for (std::uint32_t x = 0; x < 4; ++x)
    for (std::uint32_t y = 0; y < 4; ++y)
      for (std::uint32_t z = 0; z < 4; ++z) {
        const std::vector<std::uint32_t> c{x, y, z};
        std::vector<std::uint32_t> back(3);
        hilbert_coords(hilbert_index(c, 2), 2, back);
        CHECK(back == c);
      }
}

TEST_CASE("bijective, continuous, and block-aligned in higher dimensions") {
  for (auto [dims, eta] : {std::pair{3, 1}, {3, 2}, {3, 3}, {4, 2}, {5, 2}, {2, 6}}) {
    CAPTURE(dims);
    CAPTURE(eta);
    auto cells = walk(dims, eta);
    std::set<std::vector<std::uint32_t>> seen(cells.begin(), cells.end());
    CHECK(seen.size() == cells.size());
    for (std::size_t h = 0; h < cells.size(); ++h) {
      CHECK(hilbert_index(cells[h], eta) == h);
      if (h) CHECK(manhattan(cells[h - 1], cells[h]) == 1);
    }
    // Every aligned run of 2^(dims*l) positions fills a subcube of side 2^l.
    for (unsigned l = 1; l < static_cast<unsigned>(eta); ++l) {
      const std::size_t block = std::size_t{1} << (dims * l);
      for (std::size_t b = 0; b < cells.size(); b += block) {
        std::set<std::vector<std::uint32_t>> prefixes;
        for (std::size_t h = b; h < b + block; ++h) {
          auto p = cells[h];
          for (auto& v : p) v >>= l;
          prefixes.insert(p);
        }
        CHECK(prefixes.size() == 1);
      }
    }
  }
}

TEST_CASE("range checks") {
  const std::vector<std::uint32_t> bad{4, 0};
  CHECK_THROWS_AS(hilbert_index(bad, 2), ParameterError);
  std::vector<std::uint32_t> out(2);
  CHECK_THROWS_AS(hilbert_coords(16, 2, out), ParameterError);
  std::vector<std::uint32_t> wide(3);
  CHECK_THROWS_AS(hilbert_coords(0, 21, wide), ParameterError);
}
