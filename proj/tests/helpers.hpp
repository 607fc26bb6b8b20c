#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thetajoin/relation.hpp"

namespace testing_helpers {

// Integer relation with the given columns, values drawn from [lo, hi].
inline thetajoin::Relation random_relation(const std::string& name, std::size_t rows, std::size_t cols,
                                           std::int64_t lo, std::int64_t hi, std::uint64_t seed) {
  std::vector<thetajoin::Attribute> attrs;
  for (std::size_t c = 0; c < cols; ++c) attrs.push_back({std::string(1, static_cast<char>('a' + c)), thetajoin::AttrType::Integer});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(lo, hi);
  std::vector<thetajoin::Tuple> tuples(rows);
  for (auto& t : tuples)
    for (std::size_t c = 0; c < cols; ++c) t.values.emplace_back(dist(rng));
  return thetajoin::Relation(name, thetajoin::Schema(attrs), std::move(tuples));
}

inline thetajoin::Relation column_relation(const std::string& name, const std::vector<std::int64_t>& values) {
  std::vector<thetajoin::Tuple> tuples;
  for (auto v : values) tuples.push_back({{thetajoin::Value{v}}});
  return thetajoin::Relation(name, thetajoin::Schema({{"a", thetajoin::AttrType::Integer}}), std::move(tuples));
}

}  // namespace testing_helpers
