#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thetajoin/cost_model.hpp"
#include "thetajoin/global_ids.hpp"
#include "thetajoin/plan.hpp"
#include "thetajoin/query.hpp"
#include "thetajoin/relation.hpp"
#include "thetajoin/thread_pool.hpp"

namespace thetajoin {

// Result rows as global-id tuples, one column per relation in `relations`.
struct JobOutput {
  std::vector<std::size_t> relations;
  std::vector<std::uint64_t> ids;  // row-major

  std::size_t width() const { return relations.size(); }
  std::size_t rows() const { return width() ? ids.size() / width() : 0; }
  std::span<const std::uint64_t> row(std::size_t i) const {
    return std::span<const std::uint64_t>(ids).subspan(i * width(), width());
  }
  std::uint64_t bytes() const { return ids.size() * sizeof(std::uint64_t); }
};

// Columns in ascending relation order, rows sorted.
void canonicalize(JobOutput& out);
// Number of rows equal to an earlier row.
std::uint64_t count_duplicates(const JobOutput& out);

struct EngineOptions {
  std::uint64_t block_size = 64ull << 20;
  std::uint64_t memory_cap = 256ull << 20;  // per reducer, bytes of input
  std::filesystem::path spill_dir = std::filesystem::temp_directory_path();
};

struct JobReport {
  std::vector<std::size_t> relations;
  std::vector<int> conditions;
  std::uint64_t k_r = 1;
  std::uint64_t allotment = 1;
  std::uint64_t input_bytes = 0;
  std::vector<double> map_seconds;
  std::vector<double> reduce_seconds;
  std::vector<std::uint64_t> reducer_input_bytes;
  std::vector<std::uint64_t> reducer_input_tuples;
  std::vector<std::uint64_t> emissions_per_relation;  // job axis order
  std::uint64_t shuffle_bytes = 0;
  std::uint64_t candidates_checked = 0;  // partial combinations tested
  std::uint64_t qualifying = 0;          // combinations passing every condition
  std::uint64_t emitted = 0;             // qualifying and owned by the reducer
  std::uint64_t spilled_reducers = 0;
  std::uint64_t spilled_bytes = 0;
  std::uint64_t duplicates = 0;
  double wall_seconds = 0.0;
};

struct MergeReport {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::size_t> keys;
  std::uint64_t rows = 0;
  std::uint64_t input_bytes = 0;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::vector<JobReport> jobs;
  std::vector<MergeReport> merges;
  std::uint64_t k_p = 1;
  std::size_t max_concurrency = 0;
  std::uint64_t output_rows = 0;
  double wall_seconds = 0.0;
  // The plan's schedule replayed with cost-model times computed from the
  // measured shuffle volume, output size, and largest reducer input.
  double simulated_makespan = 0.0;
};

struct JobRun {
  JobOutput output;
  JobReport report;
};

// Map: each relation is cut into blocks of `block_size` bytes; every tuple
// goes to each component its global id maps to. Reduce: each component
// enumerates combinations of its tuples that pass every job condition and
// keeps those whose joint cell it owns.
JobRun run_mrj(const Query& q, const JobSpec& job, std::span<const Relation> relations, const GlobalIds& ids,
               ThreadPool& pool, std::uint64_t allotment, const EngineOptions& options = {});

// Hash join of two outputs on the global ids of `keys`.
JobOutput run_merge(const JobOutput& left, const JobOutput& right, std::span<const std::size_t> keys);

struct PlanRun {
  JobOutput output;  // canonical, every relation of the query
  RunReport report;
};

PlanRun run_plan(const Query& q, const ExecutionPlan& plan, std::span<const Relation> relations,
                 const GlobalIds& ids, const Profile& profile, const EngineOptions& options = {});

// Cost-model time of a finished job at the given allotment, from measured
// quantities.
double measured_job_seconds(const JobReport& job, const Profile& profile, std::uint64_t allotment);
double merge_seconds(double input_bytes, const Profile& profile);

using ResultRow = std::vector<Value>;
// Projected values of every row, in the output's row order.
std::vector<ResultRow> project(const Query& q, const JobOutput& out, std::span<const Relation> relations,
                               const GlobalIds& ids);
std::string render_rows(const std::vector<ResultRow>& rows);

inline constexpr double kOracleGuard = 1e8;

// Nested-loop evaluation of the whole query. Throws OracleGuardError when
// the cross product exceeds kOracleGuard.
JobOutput brute_force_join(const Query& q, std::span<const Relation> relations, const GlobalIds& ids);

}  // namespace thetajoin
