#pragma once

#include <cstdint>
#include <vector>

#include "thetajoin/partition.hpp"
#include "thetajoin/scheduler.hpp"
#include "thetajoin/statistics.hpp"

namespace thetajoin {

// What the engine needs to run one multi-relation job.
struct JobSpec {
  std::vector<std::size_t> relations;  // query relation indices, cube axis order
  std::vector<int> conditions;         // every theta id evaluated, sorted
  CubeConfig cube;
  std::uint64_t k_r = 1;  // components, one reducer each
};

struct PlannedJob {
  JobSpec spec;
  std::vector<int> path;     // theta ids in path order
  std::vector<int> residual; // induced ids not on the path
  std::uint64_t k_r_cap = 1; // reduce-count optimizer choice
  double w = 0.0;            // best cost with the profile's map slots
  std::uint64_t s = 1;       // reduce count achieving w
  JobSelectivity selectivity;          // at spec.k_r
  std::vector<double> tau;             // seconds by allotment 1..k_p
  std::vector<std::uint64_t> tau_k_r;  // reduce count behind each tau entry
};

struct PlannedMerge {
  std::size_t left = 0;  // node ids: jobs first, then merges
  std::size_t right = 0;
  std::vector<std::size_t> keys;       // shared relations
  std::vector<std::size_t> relations;  // union, ascending
  double estimated_rows = 0.0;
  double duration = 0.0;
};

struct ExecutionPlan {
  std::vector<PlannedJob> jobs;
  std::vector<PlannedMerge> merges;
  Schedule schedule;
  double makespan = 0.0;
  std::uint64_t k_p = 1;
  std::uint64_t seed = 0;

  std::vector<MergeNode> merge_nodes() const {
    std::vector<MergeNode> out;
    for (const auto& m : merges) out.push_back({m.left, m.right, m.duration});
    return out;
  }
  // Node id of the final output.
  std::size_t root() const { return merges.empty() ? 0 : jobs.size() + merges.size() - 1; }
};

}  // namespace thetajoin
