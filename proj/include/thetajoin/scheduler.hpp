#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thetajoin {

// A job whose running time depends on how many workers it holds.
// tau[a - 1] is the time with allotment a, for a = 1..tau.size().
struct MalleableJob {
  std::vector<double> tau;
};

// A merge of two earlier nodes. Node ids: jobs are 0..J-1, merge i is J+i.
// Merges are listed children-first and each holds one worker.
struct MergeNode {
  std::size_t left = 0;
  std::size_t right = 0;
  double duration = 0.0;
};

struct TaskPlacement {
  double start = 0.0;
  double finish = 0.0;
  std::uint64_t allotment = 1;
};

struct Schedule {
  std::vector<TaskPlacement> jobs;
  std::vector<TaskPlacement> merges;
  double job_phase_end = 0.0;
  double makespan = 0.0;
};

// Places tasks one by one in `order`, each at the earliest event time at
// which `allotment` workers stay free for its whole duration.
double serial_schedule(std::span<const double> durations, std::span<const std::uint64_t> allotments,
                       std::span<const std::size_t> order, std::uint64_t k_p, std::span<TaskPlacement> out);

// Two-phase heuristic: candidate allotment vectors (one per deadline drawn
// from the tau tables, plus single-step refinements), each list-scheduled
// longest-first; the shortest job phase wins. Merges run after every job
// has finished, each as soon as its inputs are done and a worker is free.
Schedule schedule_malleable(std::span<const MalleableJob> jobs, std::span<const MergeNode> merges, std::uint64_t k_p);

// Fixed allotments and placement order, e.g. to replay a plan with
// measured durations. Merges follow the job phase as above.
Schedule replay_schedule(std::span<const double> durations, std::span<const std::uint64_t> allotments,
                         std::span<const std::size_t> order, std::span<const MergeNode> merges, std::uint64_t k_p);

// Sweep over event points: capacity never exceeded, merges after their
// inputs, placements consistent with tau.
bool schedule_is_valid(const Schedule& s, std::span<const MalleableJob> jobs, std::span<const MergeNode> merges,
                       std::uint64_t k_p);

}  // namespace thetajoin
