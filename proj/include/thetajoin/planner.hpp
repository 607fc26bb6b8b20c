#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "thetajoin/cost_model.hpp"
#include "thetajoin/global_ids.hpp"
#include "thetajoin/join_graph.hpp"
#include "thetajoin/partition.hpp"
#include "thetajoin/plan.hpp"
#include "thetajoin/query.hpp"
#include "thetajoin/relation.hpp"
#include "thetajoin/statistics.hpp"

namespace thetajoin {

// One no-edge-repeating path of the join graph, evaluated as one job.
struct JobCandidate {
  std::vector<int> path;                // theta ids in traversal order
  std::vector<std::size_t> walk;        // vertices along the path, path.size() + 1 of them
  std::vector<std::size_t> relations;   // distinct vertices, ascending
  std::vector<int> labels;              // path ids, sorted
  std::vector<int> residual;            // induced ids not on the path
  std::vector<int> coverage;            // labels and residual, sorted
  double w = 0.0;
  std::uint64_t s = 1;
  std::uint64_t k_r_cap = 1;
};

enum class PruneRule { Kept, Replaced, Superset };

struct PruneDecision {
  PruneRule rule = PruneRule::Kept;
  std::vector<std::size_t> witness;  // Replaced: the covering set; Superset: the replaced subset
};

struct PrunedJoinPathGraph {
  std::vector<JobCandidate> candidates;  // every enumerated candidate
  std::vector<PruneDecision> decisions;  // parallel to candidates
  std::vector<std::size_t> worklist;     // kept candidates by ascending (w, index)
  std::vector<int> universe;             // all theta ids

  bool kept(std::size_t i) const { return decisions[i].rule == PruneRule::Kept; }
};

inline constexpr std::size_t kMaxWitnessSize = 3;

// Paths from every vertex with 1..max_len edges, one per label set (the
// lexicographically smallest path wins). Closed trails are included.
std::vector<JobCandidate> enumerate_candidates(const JoinGraph& g, std::size_t max_len);

// The three conditions for `c` to be replaced by `witness`: coverage inside
// the union, every witness strictly cheaper, total reduce count no larger.
bool check_replacement(const JobCandidate& c, std::span<const JobCandidate> witness);

// A witness of at most kMaxWitnessSize other candidates, if one exists.
std::optional<std::vector<std::size_t>> find_replacement(std::span<const JobCandidate> all, std::size_t i);

// Replacement on every multi-edge candidate, then any candidate whose
// label set strictly contains a replaced candidate's label set goes too.
// Single-edge candidates are never pruned.
PrunedJoinPathGraph prune_candidates(std::vector<JobCandidate> candidates, std::vector<int> universe);

// Greedy weighted set cover over the kept candidates. Ratio w / |new ids|,
// ties to fewer relations, then lexicographic path. Indices into candidates.
std::vector<std::size_t> select_cover(const PrunedJoinPathGraph& g);

struct PlannerOptions {
  std::uint64_t k_p = 4;
  double lambda = kDefaultLambda;
  std::size_t max_len = 6;
  std::uint64_t seed = 0;
  bool pairwise = false;  // only single-edge candidates
};

// Cost estimates for one vertex set, shared by every candidate over it.
struct VertexSetCost {
  std::vector<int> conditions;      // induced ids
  CubeConfig cube;
  KrChoice k_r_choice;
  JobSelectivity selectivity;       // alpha/beta/sigma left at n = 1
  std::vector<double> t_by_n;       // T(n) at the profile's map slots, n = 1..k_r_cap
  std::vector<JobSelectivity> by_n; // partition-dependent parts, n = 1..k_r_cap
  double w = 0.0;
  std::uint64_t s = 1;
};

class CostEstimator {
 public:
  CostEstimator(const Query& q, std::span<const Relation> relations, std::span<const RelationStats> stats,
                const GlobalIds& ids, const Profile& profile, const PlannerOptions& options);

  const VertexSetCost& cost(const std::vector<std::size_t>& relations);
  // Seconds and reduce count for allotments 1..k_p.
  std::pair<std::vector<double>, std::vector<std::uint64_t>> tau(const std::vector<std::size_t>& relations);

 private:
  double time(const VertexSetCost& c, std::uint64_t n, std::uint64_t map_slots) const;

  const Query& q_;
  std::span<const Relation> relations_;
  std::span<const RelationStats> stats_;
  const GlobalIds& ids_;
  Profile profile_;
  PlannerOptions options_;
  std::map<std::vector<std::size_t>, VertexSetCost> memo_;
};

PrunedJoinPathGraph build_pruned_graph(const JoinGraph& g, CostEstimator& costs, const PlannerOptions& options);

// Greedy pairing by smallest estimated output among nodes sharing a
// relation. Row estimates are indexed by job.
std::vector<PlannedMerge> build_merge_tree(const std::vector<std::vector<std::size_t>>& job_relations,
                                           const std::vector<double>& job_rows, std::span<const Relation> relations,
                                           const Profile& profile);

struct PlannerResult {
  PrunedJoinPathGraph graph;
  std::vector<std::size_t> cover;  // candidate indices, in job order
  ExecutionPlan plan;
};

PlannerResult plan_query_detailed(const Query& q, std::span<const Relation> relations,
                                  std::span<const RelationStats> stats, const GlobalIds& ids, const Profile& profile,
                                  const PlannerOptions& options);

ExecutionPlan plan_query(const Query& q, std::span<const Relation> relations, std::span<const RelationStats> stats,
                         const GlobalIds& ids, const Profile& profile, const PlannerOptions& options);

// Every theta id of the query evaluated by some job.
bool plan_is_sufficient(const Query& q, const ExecutionPlan& plan);

}  // namespace thetajoin
