#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thetajoin/query.hpp"
#include "thetajoin/relation.hpp"

namespace thetajoin {

struct Workload {
  std::vector<Relation> relations;
  Query query;
};

struct RandomWorkloadShape {
  std::size_t min_relations = 3;
  std::size_t max_relations = 6;
  std::uint64_t max_tuples = 200;
  double max_cross_product = 1e7;  // keeps the nested-loop oracle cheap
  std::size_t max_extra_edges = 2;
  std::int64_t domain = 24;
};

// Random connected join graph (spanning tree plus a few extra edges, which
// may be parallel) over integer and decimal columns. Condition operators
// cycle through all six starting at a random offset.
Workload random_workload(std::uint64_t seed, const RandomWorkloadShape& shape = {});

// Six relations joined in a ring by six conditions:
// R1-R2, R5-R2, R1-R3, R3-R4, R6-R5, R4-R6.
Workload cycle_workload(std::uint64_t seed, std::uint64_t tuples = 500);

// Copy of `w` with condition `theta` given the opposite operator.
Workload flip_condition(const Workload& w, int theta);

}  // namespace thetajoin
