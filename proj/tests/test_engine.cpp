#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "thetajoin/engine.hpp"
#include "thetajoin/errors.hpp"

using namespace thetajoin;
using testing_helpers::column_relation;
using testing_helpers::random_relation;

namespace {

struct Setup {
  std::vector<Relation> rels;
  Query q;
  GlobalIds ids;

  Setup(std::vector<Relation> r, const std::string& joins, std::uint64_t seed = 1) : rels(std::move(r)) {
    std::vector<Schema> schemas;
    std::string text;
    std::vector<std::uint64_t> cards;
    for (const auto& rel : rels) {
      schemas.push_back(rel.schema());
      text += "RELATION " + rel.name() + " FROM \"" + rel.name() + ".csv\"; ";
      cards.push_back(rel.cardinality());
    }
    q = parse_query(text + joins, schemas);
    ids = GlobalIds(cards, seed);
  }

  JobSpec job(std::vector<std::size_t> relations, std::vector<int> conds, std::uint64_t k_r) const {
    std::vector<std::uint64_t> cards;
    for (auto r : relations) cards.push_back(rels[r].cardinality());
    return {std::move(relations), std::move(conds), CubeConfig::for_cardinalities(cards), k_r};
  }

  JobRun run(const JobSpec& spec, std::size_t workers = 4, const EngineOptions& opt = {}) const {
    ThreadPool pool(workers);
    return run_mrj(q, spec, rels, ids, pool, workers, opt);
  }

  std::vector<int> all_conditions() const {
    std::vector<int> c;
    for (std::size_t i = 1; i <= q.conditions.size(); ++i) c.push_back(static_cast<int>(i));
    return c;
  }
};

JobOutput canonical(JobOutput o) {
  canonicalize(o);
  return o;
}

}  // namespace

TEST_CASE("two tiny relations with a < b") {
  Setup s({column_relation("R1", {1, 2}), column_relation("R2", {1, 2})}, "JOIN R1.a < R2.a;");
  for (std::uint64_t k : {1, 2, 4}) {
    auto r = s.run(s.job({0, 1}, {1}, k));
    auto rows = project(s.q, canonical(r.output), s.rels, s.ids);
    REQUIRE(rows.size() == 1);
    CHECK(render_rows(rows) == "1,2\n");
    CHECK(r.report.duplicates == 0);
  }
}

TEST_CASE("single component matches the nested loop") {
  Setup s({random_relation("R1", 40, 2, 0, 20, 1), random_relation("R2", 40, 2, 0, 20, 2)},
          "JOIN R1.a <= R2.b; JOIN R1.b <> R2.a;");
  auto r = s.run(s.job({0, 1}, {1, 2}, 1));
  CHECK(canonical(r.output).ids == brute_force_join(s.q, s.rels, s.ids).ids);
}

TEST_CASE("three-way chain across many components matches the nested loop") {
  Setup s({random_relation("R1", 50, 2, 0, 30, 3), random_relation("R2", 50, 2, 0, 30, 4),
           random_relation("R3", 50, 2, 0, 30, 5)},
          "JOIN R1.a < R2.a; JOIN R2.b >= R3.a + 10;");
  const auto oracle = brute_force_join(s.q, s.rels, s.ids);
  REQUIRE(oracle.rows() > 0);
  for (std::uint64_t k : {2, 5, 8}) {
    auto r = s.run(s.job({0, 1, 2}, {1, 2}, k));
    CHECK(r.report.duplicates == 0);
    CHECK(r.report.emitted == oracle.rows());
    CHECK(canonical(r.output).ids == oracle.ids);
  }
}

TEST_CASE("axis order of a job does not change its output") {
  Setup s({random_relation("R1", 30, 1, 0, 10, 6), random_relation("R2", 30, 1, 0, 10, 7),
           random_relation("R3", 30, 1, 0, 10, 8)},
          "JOIN R1.a = R2.a; JOIN R3.a > R2.a;");
  auto a = s.run(s.job({0, 1, 2}, {1, 2}, 4));
  auto b = s.run(s.job({2, 0, 1}, {1, 2}, 4));
  CHECK(canonical(a.output).ids == canonical(b.output).ids);
  CHECK(canonical(a.output).ids == brute_force_join(s.q, s.rels, s.ids).ids);
}

TEST_CASE("shuffled tuples equal the partition score") {
  Setup s({random_relation("R1", 37, 1, 0, 9, 9), random_relation("R2", 23, 1, 0, 9, 10),
           random_relation("R3", 41, 1, 0, 9, 11)},
          "JOIN R1.a < R2.a; JOIN R2.a < R3.a;");
  for (std::uint64_t k : {1, 3, 8, 16}) {
    const auto spec = s.job({0, 1, 2}, {1, 2}, k);
    auto r = s.run(spec);
    std::uint64_t shuffled = 0;
    for (auto e : r.report.emissions_per_relation) shuffled += e;
    CHECK(shuffled == partition_score(PartitionAssignment(spec.cube, k)).score);
    std::uint64_t tuples = 0;
    for (auto t : r.report.reducer_input_tuples) tuples += t;
    CHECK(tuples == shuffled);
  }
}

TEST_CASE("every qualifying combination is emitted exactly once") {
  Setup s({random_relation("R1", 60, 1, 0, 5, 12), random_relation("R2", 60, 1, 0, 5, 13)}, "JOIN R1.a <> R2.a;");
  const auto oracle = brute_force_join(s.q, s.rels, s.ids);
  for (std::uint64_t k : {2, 7, 16}) {
    auto r = s.run(s.job({0, 1}, {1}, k));
    CHECK(r.report.duplicates == 0);
    CHECK(r.report.emitted == oracle.rows());
    CHECK(r.report.qualifying >= r.report.emitted);
  }
}

TEST_CASE("equi-join count matches a hash count") {
  auto a = random_relation("R1", 200, 1, 0, 40, 14), b = random_relation("R2", 150, 1, 0, 40, 15);
  std::map<std::int64_t, std::uint64_t> ca, cb;
  for (std::size_t i = 0; i < a.cardinality(); ++i) ++ca[std::get<std::int64_t>(a[i].values[0])];
  for (std::size_t i = 0; i < b.cardinality(); ++i) ++cb[std::get<std::int64_t>(b[i].values[0])];
  std::uint64_t expected = 0;
  for (auto [v, n] : ca) expected += n * (cb.count(v) ? cb[v] : 0);
  Setup s({a, b}, "JOIN R1.a = R2.a;");
  auto r = s.run(s.job({0, 1}, {1}, 6));
  CHECK(r.output.rows() == expected);
}

TEST_CASE("connection window query matches the nested loop") {
  std::vector<Tuple> f12, f23;
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<std::int64_t> dt(0, 86400), dur(1800, 7200);
  for (int i = 0; i < 80; ++i) {
    const auto d = dt(rng);
    f12.push_back({{Value{d}, Value{d + dur(rng)}}});
    const auto e = dt(rng);
    f23.push_back({{Value{e}, Value{e + dur(rng)}}});
  }
  const Schema sch({{"dt", AttrType::Integer}, {"at", AttrType::Integer}});
  Setup s({Relation("F12", sch, f12), Relation("F23", sch, f23)},
          "JOIN F12.at + 3600 < F23.dt; JOIN F23.dt < F12.at + 14400;");
  const auto oracle = brute_force_join(s.q, s.rels, s.ids);
  REQUIRE(oracle.rows() > 0);
  auto r = s.run(s.job({0, 1}, {1, 2}, 4));
  CHECK(canonical(r.output).ids == oracle.ids);
}

TEST_CASE("reducers over the memory cap spill and still agree") {
  Setup s({random_relation("R1", 50, 1, 0, 20, 17), random_relation("R2", 50, 1, 0, 20, 18)}, "JOIN R1.a >= R2.a;");
  EngineOptions opt;
  opt.memory_cap = 64;
  auto r = s.run(s.job({0, 1}, {1}, 4), 2, opt);
  CHECK(r.report.spilled_reducers == 4);
  CHECK(r.report.spilled_bytes > 0);
  CHECK(canonical(r.output).ids == brute_force_join(s.q, s.rels, s.ids).ids);
}

TEST_CASE("small blocks give one map task per block") {
  Setup s({random_relation("R1", 30, 1, 0, 9, 19), random_relation("R2", 30, 1, 0, 9, 20)}, "JOIN R1.a < R2.a;");
  EngineOptions opt;
  opt.block_size = s.rels[0].tuple_bytes(0) * 10;
  auto r = s.run(s.job({0, 1}, {1}, 3), 2, opt);
  CHECK(r.report.map_seconds.size() >= 6);
  CHECK(canonical(r.output).ids == brute_force_join(s.q, s.rels, s.ids).ids);
}

TEST_CASE("merge joins on shared relation ids") {
  JobOutput l{{0, 1}, {1, 10, 2, 20, 3, 10}}, r{{1, 2}, {10, 100, 20, 200, 30, 300}};
  auto m = run_merge(l, r, std::vector<std::size_t>{1});
  CHECK(m.relations == std::vector<std::size_t>{0, 1, 2});
  CHECK(canonical(m).ids == std::vector<std::uint64_t>{1, 10, 100, 2, 20, 200, 3, 10, 100});
  CHECK_THROWS_AS(run_merge(l, r, std::vector<std::size_t>{}), PlanConsistencyError);
  CHECK_THROWS_AS(run_merge(l, r, std::vector<std::size_t>{0}), PlanConsistencyError);
}

TEST_CASE("plan of three jobs and two merges matches the nested loop") {
  Setup s({random_relation("R1", 20, 1, 0, 9, 21), random_relation("R2", 20, 1, 0, 9, 22),
           random_relation("R3", 20, 1, 0, 9, 23), random_relation("R4", 20, 1, 0, 9, 24)},
          "JOIN R1.a <= R2.a; JOIN R2.a <> R3.a; JOIN R3.a > R4.a;");
  ExecutionPlan plan;
  plan.k_p = 3;
  std::vector<MalleableJob> mj;
  for (auto [rels, cond] : std::vector<std::pair<std::vector<std::size_t>, int>>{{{0, 1}, 1}, {{1, 2}, 2}, {{2, 3}, 3}}) {
    PlannedJob pj;
    pj.spec = s.job(rels, {cond}, 3);
    pj.path = {cond};
    pj.tau = {3.0, 2.0, 1.5};
    mj.push_back({pj.tau});
    plan.jobs.push_back(std::move(pj));
  }
  plan.merges.push_back({0, 1, {1}, {0, 1, 2}, 0.0, 1.0});
  plan.merges.push_back({3, 2, {2}, {0, 1, 2, 3}, 0.0, 1.0});
  plan.schedule = schedule_malleable(mj, plan.merge_nodes(), plan.k_p);
  plan.makespan = plan.schedule.makespan;

  auto run = run_plan(s.q, plan, s.rels, s.ids, default_profile(3));
  CHECK(run.output.ids == brute_force_join(s.q, s.rels, s.ids).ids);
  CHECK(run.report.max_concurrency <= plan.k_p);
  CHECK(run.report.jobs.size() == 3);
  CHECK(run.report.merges.size() == 2);
  CHECK(run.report.simulated_makespan > 0.0);
  CHECK(run.report.output_rows == run.output.rows());
}

TEST_CASE("oracle refuses oversized cross products") {
  Setup s({random_relation("R1", 1000, 1, 0, 9, 1), random_relation("R2", 1000, 1, 0, 9, 2),
           random_relation("R3", 1000, 1, 0, 9, 3)},
          "JOIN R1.a < R2.a; JOIN R2.a < R3.a;");
  CHECK_THROWS_AS(brute_force_join(s.q, s.rels, s.ids), OracleGuardError);
}

TEST_CASE("jobs that reach outside their relations are rejected") {
  Setup s({random_relation("R1", 5, 1, 0, 9, 1), random_relation("R2", 5, 1, 0, 9, 2),
           random_relation("R3", 5, 1, 0, 9, 3)},
          "JOIN R1.a < R2.a; JOIN R2.a < R3.a;");
  CHECK_THROWS_AS(s.run(s.job({0, 1}, {2}, 1)), PlanConsistencyError);
  CHECK_THROWS_AS(s.run(s.job({0, 1}, {7}, 1)), PlanConsistencyError);
}

TEST_CASE("three overlapping jobs merged on shared relations match the nested loop") {
  std::vector<Relation> rels;
  for (std::size_t i = 0; i < 6; ++i)
    rels.push_back(random_relation("R" + std::to_string(i + 1), 20, 1, 0, 9, 40 + i));
  Setup s(std::move(rels),
          "JOIN R1.a < R2.a; JOIN R2.a <> R4.a; JOIN R1.a <= R3.a; JOIN R3.a > R4.a; JOIN R4.a = R5.a; "
          "JOIN R5.a >= R6.a;");
  ExecutionPlan plan;
  plan.k_p = 16;
  std::vector<MalleableJob> mj;
  const std::vector<std::pair<std::vector<std::size_t>, std::vector<int>>> jobs{
      {{0, 1, 3}, {1, 2}}, {{0, 2, 3}, {3, 4}}, {{3, 4, 5}, {5, 6}}};
  const std::vector<std::vector<double>> taus{{9, 8, 6, 5}, {12, 10, 8, 7}, {20, 15, 12, 11, 10, 10, 10, 9}};
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    PlannedJob pj;
    pj.spec = s.job(jobs[j].first, jobs[j].second, 4);
    pj.path = jobs[j].second;
    pj.tau = taus[j];
    pj.tau.resize(plan.k_p, pj.tau.back());
    mj.push_back({pj.tau});
    plan.jobs.push_back(std::move(pj));
  }
  plan.merges.push_back({0, 1, {0, 3}, {0, 1, 2, 3}, 0.0, 1.0});
  plan.merges.push_back({3, 2, {3}, {0, 1, 2, 3, 4, 5}, 0.0, 1.0});
  plan.schedule = schedule_malleable(mj, plan.merge_nodes(), plan.k_p);
  plan.makespan = plan.schedule.makespan;
  CHECK(plan.makespan == 11.0);

  auto run = run_plan(s.q, plan, s.rels, s.ids, default_profile(plan.k_p));
  const auto oracle = brute_force_join(s.q, s.rels, s.ids);
  CHECK(oracle.rows() > 0);
  CHECK(run.output.ids == oracle.ids);
  for (const auto& j : run.report.jobs) CHECK(j.duplicates == 0);
}

TEST_CASE("aligned splits give every reducer the same input") {
  Setup s({random_relation("R1", 64, 1, 0, 99, 51), random_relation("R2", 64, 1, 0, 99, 52)}, "JOIN R1.a < R2.a;");
  for (std::uint64_t k : {4, 16, 64}) {
    CAPTURE(k);
    const auto spec = s.job({0, 1}, {1}, k);
    REQUIRE(alignment_level(spec.cube, k) >= 0);
    const auto r = s.run(spec);
    const auto& in = r.report.reducer_input_tuples;
    REQUIRE(in.size() == k);
    CHECK(*std::min_element(in.begin(), in.end()) == *std::max_element(in.begin(), in.end()));
    CHECK(r.report.emissions_per_relation[0] == r.report.emissions_per_relation[1]);
  }
}
