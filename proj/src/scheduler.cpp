#include "thetajoin/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "thetajoin/errors.hpp"

namespace thetajoin {

namespace {

struct Placed {
  double start;
  double finish;
  std::uint64_t width;
};

bool fits(const std::vector<Placed>& placed, double t, double d, std::uint64_t width, std::uint64_t k_p) {
  // Usage only rises at start points, so checking t and every start inside
  // [t, t + d) covers the interval.
  auto usage_at = [&](double x) {
    std::uint64_t u = 0;
    for (const auto& p : placed)
      if (p.start <= x && x < p.finish) u += p.width;
    return u;
  };
  if (usage_at(t) + width > k_p) return false;
  for (const auto& p : placed)
    if (p.start > t && p.start < t + d && usage_at(p.start) + width > k_p) return false;
  return true;
}

double place(std::vector<Placed>& placed, double release, double d, std::uint64_t width, std::uint64_t k_p) {
  if (width > k_p) throw ParameterError("allotment exceeds the worker budget");
  std::set<double> candidates{release};
  for (const auto& p : placed)
    if (p.finish > release) candidates.insert(p.finish);
  for (double t : candidates) {
    if (d <= 0.0 || fits(placed, t, d, width, k_p)) {
      if (d > 0.0) placed.push_back({t, t + d, width});
      return t;
    }
  }
  // Unreachable: after the last finish everything is free.
  throw ParameterError("no feasible start found");
}

std::uint64_t max_allotment(const MalleableJob& j, std::uint64_t k_p) {
  return std::min<std::uint64_t>(k_p, j.tau.size());
}

double tau_at(const MalleableJob& j, std::uint64_t a) { return j.tau[a - 1]; }

struct Evaluation {
  double makespan = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> allot;
  std::vector<TaskPlacement> placements;
};

Evaluation evaluate_allotment(std::span<const MalleableJob> jobs, const std::vector<std::uint64_t>& allot,
                              std::uint64_t k_p) {
  const std::size_t n = jobs.size();
  std::vector<double> dur(n);
  for (std::size_t j = 0; j < n; ++j) dur[j] = tau_at(jobs[j], allot[j]);
  std::vector<std::size_t> lpt(n), wide(n);
  std::iota(lpt.begin(), lpt.end(), std::size_t{0});
  wide = lpt;
  std::stable_sort(lpt.begin(), lpt.end(), [&](std::size_t a, std::size_t b) {
    if (dur[a] != dur[b]) return dur[a] > dur[b];
    return allot[a] > allot[b];
  });
  std::stable_sort(wide.begin(), wide.end(), [&](std::size_t a, std::size_t b) {
    if (allot[a] != allot[b]) return allot[a] > allot[b];
    return dur[a] > dur[b];
  });
  Evaluation best;
  for (const auto* order : {&lpt, &wide}) {
    std::vector<TaskPlacement> out(n);
    const double ms = serial_schedule(dur, allot, *order, k_p, out);
    if (ms < best.makespan) {
      best.makespan = ms;
      best.allot = allot;
      best.placements = std::move(out);
    }
  }
  return best;
}

void place_merges(Schedule& s, std::size_t n, std::span<const MergeNode> merges, std::uint64_t k_p) {
  std::vector<Placed> placed;
  std::vector<double> node_finish(n + merges.size(), s.job_phase_end);
  s.merges.resize(merges.size());
  s.makespan = s.job_phase_end;
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const auto& m = merges[i];
    if (m.left >= n + i || m.right >= n + i) throw ParameterError("merge references a later node");
    const double release = std::max({s.job_phase_end, node_finish[m.left], node_finish[m.right]});
    const double t = place(placed, release, m.duration, 1, k_p);
    s.merges[i] = {t, t + m.duration, 1};
    node_finish[n + i] = t + m.duration;
    s.makespan = std::max(s.makespan, t + m.duration);
  }
}

}  // namespace

double serial_schedule(std::span<const double> durations, std::span<const std::uint64_t> allotments,
                       std::span<const std::size_t> order, std::uint64_t k_p, std::span<TaskPlacement> out) {
  std::vector<Placed> placed;
  double makespan = 0.0;
  for (auto j : order) {
    const double t = place(placed, 0.0, durations[j], allotments[j], k_p);
    out[j] = {t, t + durations[j], allotments[j]};
    makespan = std::max(makespan, t + durations[j]);
  }
  return makespan;
}

Schedule schedule_malleable(std::span<const MalleableJob> jobs, std::span<const MergeNode> merges, std::uint64_t k_p) {
  if (k_p < 1) throw ParameterError("worker budget must be at least 1");
  for (const auto& j : jobs)
    if (j.tau.empty()) throw ParameterError("job has an empty processing-time table");
  const std::size_t n = jobs.size();
  Schedule s;

  if (n > 0) {
    std::vector<std::vector<std::uint64_t>> candidates;
    std::vector<std::uint64_t> ones(n, 1), fastest(n, 1);
    for (std::size_t j = 0; j < n; ++j)
      for (std::uint64_t a = 1; a <= max_allotment(jobs[j], k_p); ++a)
        if (tau_at(jobs[j], a) < tau_at(jobs[j], fastest[j])) fastest[j] = a;
    candidates.push_back(ones);
    candidates.push_back(fastest);
    std::set<double> deadlines;
    for (const auto& j : jobs)
      for (std::uint64_t a = 1; a <= max_allotment(j, k_p); ++a) deadlines.insert(tau_at(j, a));
    for (double d : deadlines) {
      std::vector<std::uint64_t> allot(n);
      for (std::size_t j = 0; j < n; ++j) {
        allot[j] = fastest[j];
        for (std::uint64_t a = 1; a <= max_allotment(jobs[j], k_p); ++a)
          if (tau_at(jobs[j], a) <= d) {
            allot[j] = a;
            break;
          }
      }
      candidates.push_back(std::move(allot));
    }

    Evaluation best;
    for (const auto& c : candidates) {
      auto e = evaluate_allotment(jobs, c, k_p);
      if (e.makespan < best.makespan) best = std::move(e);
    }
    // Single-step refinement of the best vector.
    for (int round = 0; round < 64; ++round) {
      Evaluation improved = best;
      for (std::size_t j = 0; j < n; ++j)
        for (int delta : {-1, 1}) {
          auto allot = best.allot;
          const auto a = static_cast<std::int64_t>(allot[j]) + delta;
          if (a < 1 || a > static_cast<std::int64_t>(max_allotment(jobs[j], k_p))) continue;
          allot[j] = static_cast<std::uint64_t>(a);
          auto e = evaluate_allotment(jobs, allot, k_p);
          if (e.makespan < improved.makespan) improved = std::move(e);
        }
      if (!(improved.makespan < best.makespan)) break;
      best = std::move(improved);
    }
    s.jobs = std::move(best.placements);
    s.job_phase_end = best.makespan;
  }

  place_merges(s, n, merges, k_p);
  return s;
}

Schedule replay_schedule(std::span<const double> durations, std::span<const std::uint64_t> allotments,
                         std::span<const std::size_t> order, std::span<const MergeNode> merges, std::uint64_t k_p) {
  if (k_p < 1) throw ParameterError("worker budget must be at least 1");
  Schedule s;
  s.jobs.resize(durations.size());
  s.job_phase_end = serial_schedule(durations, allotments, order, k_p, s.jobs);
  place_merges(s, durations.size(), merges, k_p);
  return s;
}

bool schedule_is_valid(const Schedule& s, std::span<const MalleableJob> jobs, std::span<const MergeNode> merges,
                       std::uint64_t k_p) {
  const std::size_t n = jobs.size();
  if (s.jobs.size() != n || s.merges.size() != merges.size()) return false;
  std::vector<Placed> all;
  double job_end = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& p = s.jobs[j];
    if (p.allotment < 1 || p.allotment > k_p || p.allotment > jobs[j].tau.size()) return false;
    if (p.start < 0.0 || p.finish != p.start + jobs[j].tau[p.allotment - 1]) return false;
    all.push_back({p.start, p.finish, p.allotment});
    job_end = std::max(job_end, p.finish);
  }
  std::vector<double> finish(n + merges.size());
  for (std::size_t j = 0; j < n; ++j) finish[j] = s.jobs[j].finish;
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const auto& p = s.merges[i];
    if (p.allotment != 1 || p.finish != p.start + merges[i].duration) return false;
    if (merges[i].left >= n + i || merges[i].right >= n + i) return false;
    if (p.start < finish[merges[i].left] || p.start < finish[merges[i].right] || p.start < job_end) return false;
    finish[n + i] = p.finish;
    all.push_back({p.start, p.finish, 1});
  }
  double makespan = 0.0;
  for (const auto& p : all) {
    std::uint64_t u = 0;
    for (const auto& q : all)
      if (q.start <= p.start && p.start < q.finish) u += q.width;
    if (u > k_p) return false;
    makespan = std::max(makespan, p.finish);
  }
  return makespan == s.makespan;
}

}  // namespace thetajoin
