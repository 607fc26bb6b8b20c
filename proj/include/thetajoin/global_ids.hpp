#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thetajoin {

// One seeded random permutation of [1, |R_i|] per relation, shared by every
// job of a run so that outputs of different jobs agree on tuple identity.
class GlobalIds {
 public:
  GlobalIds() = default;
  GlobalIds(std::span<const std::uint64_t> cardinalities, std::uint64_t seed);

  std::size_t relation_count() const { return ids_.size(); }
  std::uint64_t cardinality(std::size_t rel) const { return ids_[rel].size(); }
  std::uint64_t id_of_row(std::size_t rel, std::size_t row) const { return ids_[rel][row]; }
  std::size_t row_of_id(std::size_t rel, std::uint64_t id) const { return rows_[rel][id - 1]; }

 private:
  std::vector<std::vector<std::uint64_t>> ids_;
  std::vector<std::vector<std::size_t>> rows_;
};

}  // namespace thetajoin
