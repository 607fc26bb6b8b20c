#include "thetajoin/render.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace thetajoin {

namespace {

using nlohmann::json;

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string ids(const std::vector<int>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::string names(const Query& q, const std::vector<std::size_t>& rels) {
  std::string s;
  for (std::size_t i = 0; i < rels.size(); ++i) s += (i ? " " : "") + q.relations[rels[i]].name;
  return s;
}

std::string path_text(const std::vector<int>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "-" : "") + std::to_string(path[i]);
  return s;
}

std::string node_name(const ExecutionPlan& plan, std::size_t node) {
  return node < plan.jobs.size() ? "job " + std::to_string(node) : "merge " + std::to_string(node);
}

}  // namespace

std::string render_plan(const Query& q, const ExecutionPlan& plan) {
  std::ostringstream out;
  out << "plan: " << plan.jobs.size() << " jobs, " << plan.merges.size() << " merges, k_p " << plan.k_p << ", seed "
      << plan.seed << "\n";
  for (std::size_t j = 0; j < plan.jobs.size(); ++j) {
    const auto& job = plan.jobs[j];
    const auto& at = plan.schedule.jobs[j];
    out << "job " << j << ": relations " << names(q, job.spec.relations) << "\n";
    out << "  conditions " << ids(job.spec.conditions) << " (path " << path_text(job.path) << ", residual "
        << ids(job.residual) << ")\n";
    out << "  k_r " << job.spec.k_r << " (cap " << job.k_r_cap << "), eta " << job.spec.cube.eta << ", w "
        << fixed(job.w) << " s at " << job.s << " reducers\n";
    out << "  start " << fixed(at.start) << ", finish " << fixed(at.finish) << ", allotment " << at.allotment << "\n";
    out << "  tau";
    for (std::size_t a = 0; a < job.tau.size(); ++a) out << " " << a + 1 << ":" << fixed(job.tau[a]);
    out << "\n";
  }
  for (std::size_t i = 0; i < plan.merges.size(); ++i) {
    const auto& m = plan.merges[i];
    const auto& at = plan.schedule.merges[i];
    out << "merge " << plan.jobs.size() + i << ": " << node_name(plan, m.left) << " + " << node_name(plan, m.right)
        << " on " << names(q, m.keys) << "\n";
    out << "  relations " << names(q, m.relations) << ", estimated rows " << fixed(m.estimated_rows, 1) << "\n";
    out << "  start " << fixed(at.start) << ", finish " << fixed(at.finish) << "\n";
  }
  out << "makespan " << fixed(plan.makespan) << " s\n";
  return out.str();
}

std::string render_explain(const Query& q, const PlannerResult& result, double lambda) {
  const auto& g = result.graph;
  std::ostringstream out;
  out << render_plan(q, result.plan);
  out << "\ncandidates: " << g.candidates.size() << " enumerated, " << g.worklist.size() << " kept\n";
  for (std::size_t i = 0; i < g.candidates.size(); ++i) {
    const auto& c = g.candidates[i];
    out << "  [" << i << "] path " << path_text(c.path) << " relations " << names(q, c.relations) << " covers "
        << ids(c.coverage) << " w " << fixed(c.w) << " s " << c.s << ": ";
    const auto& d = g.decisions[i];
    switch (d.rule) {
      case PruneRule::Kept:
        out << "kept";
        break;
      case PruneRule::Replaced:
        out << "replaced by";
        for (auto w : d.witness) out << " [" << w << "]";
        break;
      case PruneRule::Superset:
        out << "superset of [" << d.witness.front() << "]";
        break;
    }
    out << "\n";
  }
  out << "cover:";
  for (auto i : result.cover) out << " [" << i << "]";
  out << "\n";
  for (std::size_t j = 0; j < result.plan.jobs.size(); ++j) {
    const auto& job = result.plan.jobs[j];
    const auto choice = choose_k_r(job.spec.cube, lambda, result.plan.k_p);
    out << "\njob " << j << " reduce-count sweep (lambda " << lambda << "), chosen " << choice.k_r << "\n";
    for (const auto& p : choice.sweep)
      out << "  k_r " << p.k_r << " score " << p.score << " delta " << fixed(p.delta, 3) << "\n";
    out << "  duplication at k_r " << job.spec.k_r << ":";
    for (std::size_t d = 0; d < job.spec.relations.size(); ++d) {
      const auto f = duplication_factor(job.spec.cube, job.spec.k_r, d);
      out << " " << q.relations[job.spec.relations[d]].name << " " << fixed(f.factor, 3)
          << (f.aligned ? "" : " (measured)");
    }
    out << "\n";
  }
  return out.str();
}

std::string report_json(const Query& q, const ExecutionPlan& plan, const RunReport& report) {
  json j;
  j["k_p"] = report.k_p;
  j["max_concurrency"] = report.max_concurrency;
  j["output_rows"] = report.output_rows;
  j["wall_seconds"] = report.wall_seconds;
  j["simulated_makespan"] = report.simulated_makespan;
  j["planned_makespan"] = plan.makespan;
  json jobs = json::array();
  for (std::size_t i = 0; i < report.jobs.size(); ++i) {
    const auto& r = report.jobs[i];
    std::vector<std::string> rels;
    for (auto x : r.relations) rels.push_back(q.relations[x].name);
    jobs.push_back({{"relations", rels},
                    {"conditions", r.conditions},
                    {"k_r", r.k_r},
                    {"allotment", r.allotment},
                    {"input_bytes", r.input_bytes},
                    {"map_seconds", r.map_seconds},
                    {"reduce_seconds", r.reduce_seconds},
                    {"reducer_input_bytes", r.reducer_input_bytes},
                    {"reducer_input_tuples", r.reducer_input_tuples},
                    {"emissions_per_relation", r.emissions_per_relation},
                    {"shuffle_bytes", r.shuffle_bytes},
                    {"candidates_checked", r.candidates_checked},
                    {"qualifying", r.qualifying},
                    {"emitted", r.emitted},
                    {"duplicates", r.duplicates},
                    {"spilled_reducers", r.spilled_reducers},
                    {"spilled_bytes", r.spilled_bytes},
                    {"wall_seconds", r.wall_seconds}});
  }
  j["jobs"] = jobs;
  json merges = json::array();
  for (const auto& m : report.merges) {
    std::vector<std::string> keys;
    for (auto x : m.keys) keys.push_back(q.relations[x].name);
    merges.push_back({{"left", m.left},
                      {"right", m.right},
                      {"keys", keys},
                      {"rows", m.rows},
                      {"input_bytes", m.input_bytes},
                      {"wall_seconds", m.wall_seconds}});
  }
  j["merges"] = merges;
  return j.dump(2) + "\n";
}

std::string partition_json(const Query& q, const ExecutionPlan& plan) {
  json jobs = json::array();
  for (const auto& job : plan.jobs) {
    const PartitionAssignment pa(job.spec.cube, job.spec.k_r);
    std::vector<std::string> rels;
    for (auto x : job.spec.relations) rels.push_back(q.relations[x].name);
    json comps = json::array();
    for (std::uint64_t c = 0; c < pa.k_r(); ++c) {
      json ext = json::array();
      for (std::size_t d = 0; d < pa.dims(); ++d) ext.push_back({pa.extent(c, d).lo, pa.extent(c, d).hi});
      comps.push_back({{"component", c},
                       {"curve_begin", pa.boundaries()[c]},
                       {"curve_end", pa.boundaries()[c + 1]},
                       {"extents", ext}});
    }
    jobs.push_back({{"relations", rels},
                    {"cardinalities", job.spec.cube.cardinalities},
                    {"eta", job.spec.cube.eta},
                    {"k_r", pa.k_r()},
                    {"score", partition_score(pa).score},
                    {"components", comps}});
  }
  return json{{"jobs", jobs}}.dump(2) + "\n";
}

}  // namespace thetajoin
