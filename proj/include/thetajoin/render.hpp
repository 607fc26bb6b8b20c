#pragma once

#include <string>

#include "thetajoin/engine.hpp"
#include "thetajoin/planner.hpp"

namespace thetajoin {

// Jobs with relations, conditions, reduce count, tau table, start and
// allotment; merges with keys and start; the makespan.
std::string render_plan(const Query& q, const ExecutionPlan& plan);

// The plan plus every enumerated candidate with its pruning decision and
// witness, and per job the reduce-count sweep and duplication factors.
std::string render_explain(const Query& q, const PlannerResult& result, double lambda);

std::string report_json(const Query& q, const ExecutionPlan& plan, const RunReport& report);

// Curve boundaries and per-component extents of every job's partition.
std::string partition_json(const Query& q, const ExecutionPlan& plan);

}  // namespace thetajoin
