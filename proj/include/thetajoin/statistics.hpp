#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thetajoin/global_ids.hpp"
#include "thetajoin/partition.hpp"
#include "thetajoin/query.hpp"
#include "thetajoin/relation.hpp"

namespace thetajoin {

struct AttributeStats {
  std::string name;
  Value min;
  Value max;
  double distinct = 0.0;  // estimate, <= cardinality
};

struct RelationStats {
  std::string relation;
  std::uint64_t cardinality = 0;
  std::uint64_t bytes_total = 0;
  double rate = 1.0;
  std::uint64_t seed = 0;
  std::vector<AttributeStats> attributes;
  std::vector<std::size_t> sample_rows;  // sorted row positions of the sample
};

// Uniform sample without replacement of ceil(rate * |R|) rows. Cardinality
// and byte size are exact; min/max come from the sample; distinct counts
// use the Haas-Stokes first-order jackknife (Duj1), capped at |R|.
RelationStats sample_relation(const Relation& r, double rate, std::uint64_t seed);

// d / (1 - (1 - q) f1 / n) for a sample of n rows out of `cardinality`, with
// d distinct values of which f1 appear once.
double estimate_distinct(std::uint64_t sample_size, std::uint64_t distinct_in_sample,
                         std::uint64_t singletons, std::uint64_t cardinality);

struct JobSelectivity {
  double alpha = 0.0;             // map output bytes / map input bytes
  double beta = 0.0;              // reduce output bytes / reduce input bytes
  double sigma = 0.0;             // bytes, spread of reducer input sizes
  double join_selectivity = 0.0;  // qualifying fraction of the cross product
  double s_i = 0.0;               // bytes of job input
  double output_rows = 0.0;       // join_selectivity * prod |R_i|
  std::uint64_t combinations_checked = 0;
  bool subsampled = false;
};

inline constexpr std::uint64_t kMaxSampleCombinations = 1'000'000;

// Bytes a job output row occupies: one 8-byte global id per relation.
inline std::uint64_t output_row_bytes(std::size_t relation_count) { return 8 * relation_count; }

struct JobInputs {
  const Query* query = nullptr;
  std::vector<std::size_t> relations;  // query relation indices, cube axis order
  std::vector<int> conditions;         // theta ids evaluated by the job
};

// Estimates alpha/beta/sigma for one job. `relations` and `stats` are indexed
// by query relation; `pa` is the job's partition over `job.relations`.
// Conjunctions are evaluated jointly on the cross product of samples; above
// kMaxSampleCombinations, combinations are drawn at random.
JobSelectivity estimate_job_selectivity(const JobInputs& job, std::span<const Relation> relations,
                                        std::span<const RelationStats> stats, const PartitionAssignment& pa,
                                        const GlobalIds& ids, std::uint64_t seed);

// The partition-independent part: s_i, join selectivity, output rows.
JobSelectivity estimate_join_selectivity(const JobInputs& job, std::span<const Relation> relations,
                                         std::span<const RelationStats> stats, std::uint64_t seed);
// Fills alpha, beta and sigma of `sel` for partition `pa`.
void apply_partition(JobSelectivity& sel, const JobInputs& job, std::span<const Relation> relations,
                     std::span<const RelationStats> stats, const PartitionAssignment& pa, const GlobalIds& ids);

// True when every condition of `conds` holds for the given rows (indexed by
// query relation; only the rows of relations the conditions touch are read).
bool conditions_hold(const Query& q, std::span<const int> conds, std::span<const Relation> relations,
                     std::span<const std::size_t> rows);

// Sidecar `<relation file>.stats` caching a sample. A cached sidecar is used
// only if rate, seed, and the source file's size and mtime all still match.
std::filesystem::path stats_path(const std::filesystem::path& relation_file);
void save_stats(const RelationStats& stats, const Relation& r, const std::filesystem::path& relation_file);
std::optional<RelationStats> load_stats(const Relation& r, const std::filesystem::path& relation_file, double rate,
                                        std::uint64_t seed);

}  // namespace thetajoin
