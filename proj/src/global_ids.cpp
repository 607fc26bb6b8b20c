#include "thetajoin/global_ids.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "thetajoin/rng.hpp"

namespace thetajoin {

GlobalIds::GlobalIds(std::span<const std::uint64_t> cardinalities, std::uint64_t seed) {
  ids_.resize(cardinalities.size());
  rows_.resize(cardinalities.size());
  for (std::size_t r = 0; r < cardinalities.size(); ++r) {
    auto& ids = ids_[r];
    ids.resize(cardinalities[r]);
    std::iota(ids.begin(), ids.end(), std::uint64_t{1});
    std::mt19937_64 rng(mix_seed(seed, 1000 + r));
    std::shuffle(ids.begin(), ids.end(), rng);
    auto& rows = rows_[r];
    rows.resize(ids.size());
    for (std::size_t row = 0; row < ids.size(); ++row) rows[ids[row] - 1] = row;
  }
}

}  // namespace thetajoin
