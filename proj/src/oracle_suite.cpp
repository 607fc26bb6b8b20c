#include "thetajoin/oracle_suite.hpp"

#include "thetajoin/engine.hpp"
#include "thetajoin/planner.hpp"
#include "thetajoin/rng.hpp"

namespace thetajoin {

std::size_t OracleSuiteResult::passed() const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.match && c.duplicates == 0 && c.shuffle_matches_score;
  return n;
}

std::uint64_t OracleSuiteResult::duplicates() const {
  std::uint64_t n = 0;
  for (const auto& c : cases) n += c.duplicates;
  return n;
}

OracleSuiteResult run_oracle_suite(const OracleSuiteOptions& options, const Profile& profile) {
  OracleSuiteResult out;
  for (std::size_t i = 0; i < options.count; ++i) {
    OracleCase oc;
    oc.seed = mix_seed(options.seed, i);
    try {
      const auto w = random_workload(oc.seed, options.shape);
      oc.relations = w.relations.size();
      oc.conditions = w.query.conditions.size();
      for (const auto& c : w.query.conditions) ++out.operator_counts[static_cast<std::size_t>(c.op)];
      const auto run_w = options.inject_flip ? flip_condition(w, 1) : w;

      std::vector<RelationStats> stats;
      std::vector<std::uint64_t> cards;
      for (std::size_t r = 0; r < w.relations.size(); ++r) {
        stats.push_back(sample_relation(w.relations[r], options.sample_rate, mix_seed(oc.seed, 500 + r)));
        cards.push_back(w.relations[r].cardinality());
      }
      const GlobalIds ids(cards, oc.seed);
      PlannerOptions po;
      po.k_p = options.k_p;
      po.seed = oc.seed;
      const auto plan = plan_query(run_w.query, run_w.relations, stats, ids, profile, po);
      const auto run = run_plan(run_w.query, plan, run_w.relations, ids, profile);
      oc.jobs = plan.jobs.size();
      for (std::size_t j = 0; j < plan.jobs.size(); ++j) {
        const auto& rep = run.report.jobs[j];
        oc.duplicates += rep.duplicates;
        const auto score = partition_score(PartitionAssignment(plan.jobs[j].spec.cube, plan.jobs[j].spec.k_r));
        if (rep.emissions_per_relation != score.per_dim_sums) oc.shuffle_matches_score = false;
      }
      const auto oracle = brute_force_join(w.query, w.relations, ids);
      oc.rows = run.output.rows();
      oc.oracle_rows = oracle.rows();
      oc.match = run.output.relations == oracle.relations && run.output.ids == oracle.ids;
    } catch (const std::exception& e) {
      oc.error = e.what();
    }
    out.cases.push_back(std::move(oc));
  }
  return out;
}

}  // namespace thetajoin
