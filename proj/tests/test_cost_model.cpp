#include <filesystem>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "thetajoin/cost_model.hpp"

using namespace thetajoin;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Rational r(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

// Profile in MB units with the flat tables of the worked examples.
BasicProfile<Rational> worked(std::uint64_t slots) {
  BasicProfile<Rational> p;
  p.c1 = r(1, 100);
  p.c2 = r(2, 100);
  p.p = PiecewiseLinear<Rational>::flat(r(5, 1000));
  p.q = PiecewiseLinear<Rational>::flat(r(1, 100));
  p.block_size = 64;
  p.map_slots = slots;
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("map task cost") {
  const auto p = worked(25);
  CHECK(map_task_cost(p, r(6400), 100, r(1, 2)) == r(8, 10));
  CHECK(map_task_cost(p, r(6400), 100, r(0)) == r(64, 100));
  CHECK(map_task_cost(p, r(0), 100, r(1, 2)) == 0);
}

TEST_CASE("map phase cost rounds waves up") {
  CHECK(map_phase_cost(worked(25), r(8, 10), 100) == r(32, 10));
  CHECK(map_phase_cost(worked(30), r(8, 10), 100) == r(32, 10));
  CHECK(map_phase_cost(worked(200), r(8, 10), 100) == r(8, 10));
  CHECK(map_phase_cost(worked(1), r(8, 10), 100) == r(80));
}

TEST_CASE("copy costs") {
  const auto p = worked(25);
  auto [t_cp, j_cp] = copy_costs(p, r(6400), 100, 8, r(1, 2));
  CHECK(t_cp == r(16, 100));
  CHECK(j_cp == r(64, 100));
  auto [t2, j2] = copy_costs(p, r(6400), 100, 16, r(1, 2));
  (void)j2;
  CHECK(t2 == r(4, 100) + r(16, 100));  // copy term halves, connection term doubles
  CHECK(copy_costs(p, r(6400), 100, 8, r(0)).first == r(8, 100));
}

TEST_CASE("reduce phase cost") {
  const auto p = worked(25);
  auto [s_r, j_r] = reduce_phase_cost(p, r(6400), 8, r(1, 2), r(0), r(0));
  CHECK(s_r == 400);
  CHECK(j_r == r(5, 1000) * 400);
  CHECK(reduce_phase_cost(p, r(6400), 1, r(1, 2), r(0), r(0)).first == 3200);
  CHECK(reduce_phase_cost(p, r(6400), 8, r(1, 2), r(0), r(10)).first == 430);
}

TEST_CASE("total picks the overlapping branch") {
  const auto p = worked(25);
  const auto e = mrj_total_time(p, r(6400), 100, 8, r(1, 2), r(3, 4), r(0));
  CHECK(e.t_m == r(8, 10));
  CHECK(e.t_cp == r(16, 100));
  CHECK(e.j_m == r(32, 10));
  CHECK(e.j_r == (r(5, 1000) + r(3, 4) * r(1, 100)) * 400);
  CHECK(e.total == e.j_m + e.t_cp + e.j_r);
  // With j_r = 2.0 the first branch gives 5.36.
  CHECK(e.j_m + e.t_cp + r(2) == r(536, 100));
  CHECK(e.total <= e.j_m + e.j_cp + e.j_r);
  CHECK(e.m == 100);
  CHECK(e.n == 8);
}

TEST_CASE("branches agree where map and copy times meet") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto p = worked(1 + rng() % 40);
    const Rational s_i = r(1 + rng() % 100000, 1 + rng() % 50);
    const std::uint64_t m = 1 + rng() % 300, n = 1 + rng() % 64;
    const Rational alpha = r(1 + rng() % 500, 100);
    p.q = PiecewiseLinear<Rational>::flat(r(0));
    const Rational t_m = map_task_cost(p, s_i, m, alpha);
    p.c2 = t_m * Rational(n * m) / (alpha * s_i);
    const auto e = mrj_total_time(p, s_i, m, n, alpha, r(1), r(0));
    REQUIRE(e.t_cp == e.t_m);
    CHECK(e.j_m + e.t_cp == e.t_m + e.j_cp);
  }
}

TEST_CASE("overlap bound and monotonicity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Profile p;
    p.c1 = 1e-9 + u(rng) * 1e-6;
    p.c2 = 1e-9 + u(rng) * 1e-6;
    p.p = PiecewiseLinear<double>({{0.0, u(rng) * 1e-7}, {1e6, 1e-7 + u(rng) * 1e-7}, {1e9, 3e-7}});
    p.q = PiecewiseLinear<double>({{1.0, u(rng) * 0.01}, {64.0, 0.01 + u(rng) * 0.01}});
    p.map_slots = 1 + rng() % 16;
    const double s_i = u(rng) * 1e9;
    const std::uint64_t m = 1 + rng() % 50, n = 1 + rng() % 64;
    const double alpha = u(rng) * 4, beta = u(rng), sigma = u(rng) * 1e6;
    const auto e = mrj_total_time(p, s_i, m, n, alpha, beta, sigma);
    CHECK(e.total <= e.j_m + e.j_cp + e.j_r);
    CHECK(e.total >= 0);
    const auto bigger = mrj_total_time(p, s_i * 1.5, m, n, alpha, beta, sigma);
    CHECK(bigger.total >= e.total);
    const auto wider = mrj_total_time(p, s_i, m, n, alpha, beta, sigma * 2);
    CHECK(wider.total >= e.total);
  }
}

TEST_CASE("reduce count sweep is unimodal under flat tables") {
  const auto p = worked(25);
  std::vector<Rational> totals;
  for (std::uint64_t n = 1; n <= 64; ++n) totals.push_back(mrj_total_time(p, r(6400), 100, n, r(1, 2), r(1, 2), r(1)).total);
  std::size_t best = 0;
  for (std::size_t i = 1; i < totals.size(); ++i)
    if (totals[i] < totals[best]) best = i;
  for (std::size_t i = 1; i <= best; ++i) CHECK(totals[i] <= totals[i - 1]);
  for (std::size_t i = best + 1; i < totals.size(); ++i) CHECK(totals[i] >= totals[i - 1]);
  MESSAGE("minimizing reduce count: " << best + 1);
}

TEST_CASE("lookup tables") {
  PiecewiseLinear<double> t({{0.0, 1.0}, {10.0, 3.0}, {20.0, 3.0}});
  CHECK(t(-5.0) == 1.0);
  CHECK(t(5.0) == doctest::Approx(2.0));
  CHECK(t(15.0) == 3.0);
  CHECK(t(100.0) == 3.0);
  CHECK_THROWS_AS(PiecewiseLinear<double>({{0.0, 2.0}, {1.0, 1.0}}), ParameterError);
  CHECK_THROWS_AS(PiecewiseLinear<double>({{1.0, 2.0}, {1.0, 3.0}}), ParameterError);
}

TEST_CASE("profile json round trip") {
  auto p = default_profile(8);
  p.q = PiecewiseLinear<double>({{1.0, 0.001}, {8.0, 0.004}});
  const auto back = profile_from_json(profile_to_json(p));
  CHECK(back.c1 == p.c1);
  CHECK(back.c2 == p.c2);
  CHECK(back.map_slots == 8);
  CHECK(back.q.knots() == p.q.knots());
  CHECK(back.p.knots() == p.p.knots());
  CHECK(back.label == p.label);
  const auto path = std::filesystem::temp_directory_path() / "thetajoin_profile_test.json";
  save_profile(p, path);
  CHECK(load_profile(path).merge_c == p.merge_c);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(profile_from_json("{\"c1\": 0}"), ParameterError);
  CHECK_THROWS_AS(profile_from_json("not json"), ParameterError);
}

TEST_CASE("default profile values") {
  const auto p = default_profile(4);
  CHECK(p.c1 * kMiB == doctest::Approx(0.01));
  CHECK(p.c2 * kMiB == doctest::Approx(0.02));
  CHECK(p.p(123.0) * kMiB == doctest::Approx(0.005));
  CHECK(p.q(7.0) == doctest::Approx(0.01));
  CHECK(p.block_size == 64ull << 20);
  CHECK(map_task_count(0, p.block_size) == 1);
  CHECK(map_task_count((64ull << 20) + 1, p.block_size) == 2);
}
