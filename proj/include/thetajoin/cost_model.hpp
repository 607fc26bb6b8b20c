#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "thetajoin/errors.hpp"

namespace thetajoin {

// Monotone lookup table, linear between knots and clamped beyond the ends.
template <class Real>
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<Real, Real>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw ParameterError("lookup table needs at least one knot");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i - 1].first < knots_[i].first)) throw ParameterError("lookup table knots must increase");
      if (knots_[i].second < knots_[i - 1].second) throw ParameterError("lookup table must be non-decreasing");
    }
  }

  static PiecewiseLinear flat(Real y) { return PiecewiseLinear({{Real(0), y}}); }

  Real operator()(const Real& x) const {
    if (knots_.empty()) return Real(0);
    if (!(knots_.front().first < x)) return knots_.front().second;
    if (!(x < knots_.back().first)) return knots_.back().second;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](const Real& v, const auto& k) { return v < k.first; });
    auto lo = hi - 1;
    const Real span = hi->first - lo->first;
    return lo->second + (hi->second - lo->second) * ((x - lo->first) / span);
  }

  const std::vector<std::pair<Real, Real>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<Real, Real>> knots_;
};

// Machine constants for the single-job cost model. Times are seconds,
// sizes bytes.
template <class Real>
struct BasicProfile {
  Real c1 = Real(0);        // sequential I/O, s/byte
  Real c2 = Real(0);        // network copy, s/byte
  PiecewiseLinear<Real> p;  // spill bytes per task -> s/byte
  PiecewiseLinear<Real> q;  // connection count -> s/connection
  std::uint64_t block_size = 64ull << 20;
  std::uint64_t map_slots = 1;
  Real merge_c = Real(0);  // s/byte of global ids read by a merge
  std::string label;
  bool low_confidence = false;

  void validate() const {
    if (!(Real(0) < c1) || !(Real(0) < c2)) throw ParameterError("profile: c1 and c2 must be positive");
    if (block_size == 0) throw ParameterError("profile: block_size must be positive");
    if (map_slots < 1) throw ParameterError("profile: map_slots must be at least 1");
    if (merge_c < Real(0)) throw ParameterError("profile: merge_c must be non-negative");
    if (p.knots().empty() || q.knots().empty()) throw ParameterError("profile: p and q tables required");
  }
};

using Profile = BasicProfile<double>;

inline constexpr double kMiB = 1024.0 * 1024.0;

// Synthetic defaults: flat p = 0.005 s/MB, q = 0.01 s/connection,
// c1 = 0.01 s/MB, c2 = 0.02 s/MB, 64 MB blocks.
Profile default_profile(std::uint64_t map_slots);

Profile load_profile(const std::filesystem::path& path);
void save_profile(const Profile& profile, const std::filesystem::path& path);
std::string profile_to_json(const Profile& profile);
Profile profile_from_json(const std::string& text);

template <class Real>
struct MrjCostEstimate {
  Real s_i = Real(0);
  std::uint64_t m = 1;
  std::uint64_t n = 1;
  Real t_m = Real(0);
  Real j_m = Real(0);
  Real t_cp = Real(0);
  Real j_cp = Real(0);
  Real s_r_star = Real(0);
  Real j_r = Real(0);
  Real total = Real(0);
};

inline std::uint64_t waves(std::uint64_t tasks, std::uint64_t slots) { return (tasks + slots - 1) / slots; }

// ceil(s_i / block_size), at least one task.
inline std::uint64_t map_task_count(std::uint64_t s_i, std::uint64_t block_size) {
  return std::max<std::uint64_t>(1, (s_i + block_size - 1) / block_size);
}

// (c1 + p(alpha s_i / m) alpha) s_i / m
template <class Real>
Real map_task_cost(const BasicProfile<Real>& prof, const Real& s_i, std::uint64_t m, const Real& alpha) {
  if (m < 1) throw ParameterError("map task count must be at least 1");
  const Real per_map = s_i / Real(m);
  return (prof.c1 + prof.p(alpha * per_map) * alpha) * per_map;
}

template <class Real>
Real map_phase_cost(const BasicProfile<Real>& prof, const Real& t_m, std::uint64_t m) {
  if (m < 1) throw ParameterError("map task count must be at least 1");
  return t_m * Real(waves(m, prof.map_slots));
}

// (t_cp, j_cp): one map's copy to n reducers, and the whole copy phase.
template <class Real>
std::pair<Real, Real> copy_costs(const BasicProfile<Real>& prof, const Real& s_i, std::uint64_t m, std::uint64_t n,
                                 const Real& alpha) {
  if (m < 1 || n < 1) throw ParameterError("task counts must be at least 1");
  const Real t_cp = prof.c2 * alpha * s_i / Real(n * m) + prof.q(Real(n)) * Real(n);
  return {t_cp, t_cp * Real(waves(m, prof.map_slots))};
}

// (S*_r, j_r) with the largest reducer input taken three sigmas above the mean.
template <class Real>
std::pair<Real, Real> reduce_phase_cost(const BasicProfile<Real>& prof, const Real& s_i, std::uint64_t n,
                                        const Real& alpha, const Real& beta, const Real& sigma) {
  if (n < 1) throw ParameterError("reduce task count must be at least 1");
  const Real s_r = alpha * s_i / Real(n) + Real(3) * sigma;
  return {s_r, (prof.p(s_r) + beta * prof.c1) * s_r};
}

// Full estimate with a known largest reducer input.
template <class Real>
MrjCostEstimate<Real> mrj_cost_with_reduce_input(const BasicProfile<Real>& prof, const Real& s_i, std::uint64_t m,
                                                 std::uint64_t n, const Real& alpha, const Real& beta,
                                                 const Real& s_r_star) {
  MrjCostEstimate<Real> e;
  e.s_i = s_i;
  e.m = m;
  e.n = n;
  e.t_m = map_task_cost(prof, s_i, m, alpha);
  e.j_m = map_phase_cost(prof, e.t_m, m);
  std::tie(e.t_cp, e.j_cp) = copy_costs(prof, s_i, m, n, alpha);
  e.s_r_star = s_r_star;
  e.j_r = (prof.p(s_r_star) + beta * prof.c1) * s_r_star;
  // Maps and copies overlap: the slower of the two streams every wave.
  if (!(e.t_m < e.t_cp))
    e.total = e.j_m + e.t_cp + e.j_r;
  else
    e.total = e.t_m + e.j_cp + e.j_r;
  return e;
}

template <class Real>
MrjCostEstimate<Real> mrj_total_time(const BasicProfile<Real>& prof, const Real& s_i, std::uint64_t m,
                                     std::uint64_t n, const Real& alpha, const Real& beta, const Real& sigma) {
  const auto [s_r, j_r] = reduce_phase_cost(prof, s_i, n, alpha, beta, sigma);
  (void)j_r;
  return mrj_cost_with_reduce_input(prof, s_i, m, n, alpha, beta, s_r);
}

}  // namespace thetajoin
