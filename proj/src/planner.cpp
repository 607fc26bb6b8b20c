#include "thetajoin/planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "thetajoin/errors.hpp"

namespace thetajoin {

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<int> induced_conditions(const Query& q, const std::vector<std::size_t>& rels) {
  std::vector<int> out;
  for (std::size_t i = 0; i < q.conditions.size(); ++i) {
    const auto& c = q.conditions[i];
    if (contains(rels, c.left.attr.relation) && contains(rels, c.right.attr.relation))
      out.push_back(static_cast<int>(i + 1));
  }
  return out;
}

bool strict_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::vector<JobCandidate> enumerate_candidates(const JoinGraph& g, std::size_t max_len) {
  if (max_len < 1) throw ParameterError("max path length must be at least 1");
  std::map<std::vector<int>, JobCandidate> by_labels;
  std::vector<bool> used(g.edge_count(), false);
  std::vector<int> path;
  std::vector<std::size_t> walk;

  auto record = [&] {
    JobCandidate c;
    c.path = path;
    c.walk = walk;
    c.labels = path;
    std::sort(c.labels.begin(), c.labels.end());
    c.relations = walk;
    std::sort(c.relations.begin(), c.relations.end());
    c.relations.erase(std::unique(c.relations.begin(), c.relations.end()), c.relations.end());
    auto it = by_labels.find(c.labels);
    if (it == by_labels.end() || c.path < it->second.path) by_labels[c.labels] = std::move(c);
  };
  auto extend = [&](auto& self, std::size_t v) -> void {
    if (!path.empty()) record();
    if (path.size() == max_len) return;
    for (auto e : g.incident(v)) {
      if (used[e]) continue;
      const auto& edge = g.edge(e);
      used[e] = true;
      path.push_back(edge.theta);
      walk.push_back(edge.other(v));
      self(self, edge.other(v));
      walk.pop_back();
      path.pop_back();
      used[e] = false;
    }
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    walk = {v};
    extend(extend, v);
  }

  std::vector<JobCandidate> out;
  for (auto& [labels, c] : by_labels) {
    for (const auto& e : g.edges())
      if (contains(c.relations, e.u) && contains(c.relations, e.v) &&
          !std::binary_search(c.labels.begin(), c.labels.end(), e.theta))
        c.residual.push_back(e.theta);
    std::sort(c.residual.begin(), c.residual.end());
    std::merge(c.labels.begin(), c.labels.end(), c.residual.begin(), c.residual.end(), std::back_inserter(c.coverage));
    out.push_back(std::move(c));
  }
  // Shorter paths first, then by path.
  std::stable_sort(out.begin(), out.end(), [](const JobCandidate& a, const JobCandidate& b) {
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.path < b.path;
  });
  return out;
}

bool check_replacement(const JobCandidate& c, std::span<const JobCandidate> witness) {
  if (witness.empty()) return false;
  std::vector<int> covered;
  std::uint64_t s_sum = 0;
  for (const auto& e : witness) {
    if (!(e.w < c.w)) return false;
    covered.insert(covered.end(), e.coverage.begin(), e.coverage.end());
    s_sum += e.s;
  }
  std::sort(covered.begin(), covered.end());
  return std::includes(covered.begin(), covered.end(), c.coverage.begin(), c.coverage.end()) && c.s >= s_sum;
}

std::optional<std::vector<std::size_t>> find_replacement(std::span<const JobCandidate> all, std::size_t i) {
  const auto& c = all[i];
  if (c.coverage.empty() || c.coverage.size() > 64) return std::nullopt;
  const std::uint64_t full = c.coverage.size() == 64 ? ~0ull : (1ull << c.coverage.size()) - 1;

  // One representative per covered subset: the smallest reduce count.
  std::map<std::uint64_t, std::size_t> pool;
  for (std::size_t j = 0; j < all.size(); ++j) {
    const auto& e = all[j];
    if (j == i || !(e.w < c.w) || e.s > c.s) continue;
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < c.coverage.size(); ++b)
      if (std::binary_search(e.coverage.begin(), e.coverage.end(), c.coverage[b])) mask |= 1ull << b;
    if (!mask) continue;
    auto it = pool.find(mask);
    if (it == pool.end() || e.s < all[it->second].s) pool[mask] = j;
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> p(pool.begin(), pool.end());
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  auto s_of = [&](std::size_t k) { return all[p[k].second].s; };
  auto done = [&](std::vector<std::size_t> w) {
    for (auto& x : w) x = p[x].second;
    std::sort(w.begin(), w.end());
    return std::optional<std::vector<std::size_t>>(std::move(w));
  };
  const std::size_t n = p.size();
  for (std::size_t a = 0; a < n; ++a)
    if (p[a].first == full && s_of(a) <= c.s) return done({a});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if ((p[a].first | p[b].first) == full && s_of(a) + s_of(b) <= c.s) return done({a, b});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (s_of(a) + s_of(b) > c.s) continue;
      for (std::size_t d = b + 1; d < n; ++d)
        if ((p[a].first | p[b].first | p[d].first) == full && s_of(a) + s_of(b) + s_of(d) <= c.s)
          return done({a, b, d});
    }
  return std::nullopt;
}

PrunedJoinPathGraph prune_candidates(std::vector<JobCandidate> candidates, std::vector<int> universe) {
  PrunedJoinPathGraph g;
  g.candidates = std::move(candidates);
  g.universe = std::move(universe);
  g.decisions.assign(g.candidates.size(), {});
  for (std::size_t i = 0; i < g.candidates.size(); ++i) {
    if (g.candidates[i].path.size() < 2) continue;
    if (auto w = find_replacement(g.candidates, i)) g.decisions[i] = {PruneRule::Replaced, std::move(*w)};
  }
  for (std::size_t i = 0; i < g.candidates.size(); ++i) {
    if (g.candidates[i].path.size() < 2 || !g.kept(i)) continue;
    for (std::size_t j = 0; j < g.candidates.size(); ++j)
      if (g.decisions[j].rule == PruneRule::Replaced && strict_subset(g.candidates[j].labels, g.candidates[i].labels)) {
        g.decisions[i] = {PruneRule::Superset, {j}};
        break;
      }
  }
  for (std::size_t i = 0; i < g.candidates.size(); ++i)
    if (g.kept(i)) g.worklist.push_back(i);
  std::stable_sort(g.worklist.begin(), g.worklist.end(),
                   [&](std::size_t a, std::size_t b) { return g.candidates[a].w < g.candidates[b].w; });
  return g;
}

std::vector<std::size_t> select_cover(const PrunedJoinPathGraph& g) {
  std::vector<int> covered;
  std::vector<std::size_t> out;
  auto fresh = [&](const JobCandidate& c) {
    std::size_t n = 0;
    for (int id : c.coverage)
      if (!std::binary_search(covered.begin(), covered.end(), id) &&
          std::binary_search(g.universe.begin(), g.universe.end(), id))
        ++n;
    return n;
  };
  auto complete = [&] { return std::includes(covered.begin(), covered.end(), g.universe.begin(), g.universe.end()); };
  while (!complete()) {
    std::size_t best = g.candidates.size();
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < g.candidates.size(); ++i) {
      if (!g.kept(i)) continue;
      const auto& c = g.candidates[i];
      const auto n = fresh(c);
      if (n == 0) continue;
      const double ratio = c.w / static_cast<double>(n);
      bool better = best == g.candidates.size();
      if (!better) {
        const auto& b = g.candidates[best];
        if (ratio != best_ratio)
          better = ratio < best_ratio;
        else if (c.relations.size() != b.relations.size())
          better = c.relations.size() < b.relations.size();
        else
          better = c.path < b.path;
      }
      if (better) {
        best = i;
        best_ratio = ratio;
      }
    }
    if (best == g.candidates.size()) throw PlanConsistencyError("candidates do not cover every join condition");
    out.push_back(best);
    const auto& c = g.candidates[best].coverage;
    std::vector<int> merged;
    std::set_union(covered.begin(), covered.end(), c.begin(), c.end(), std::back_inserter(merged));
    covered = std::move(merged);
  }
  return out;
}

CostEstimator::CostEstimator(const Query& q, std::span<const Relation> relations, std::span<const RelationStats> stats,
                             const GlobalIds& ids, const Profile& profile, const PlannerOptions& options)
    : q_(q), relations_(relations), stats_(stats), ids_(ids), profile_(profile), options_(options) {
  if (options.k_p < 1) throw ParameterError("worker budget must be at least 1");
  if (relations.size() != q.relations.size() || stats.size() != q.relations.size())
    throw ParameterError("relations and statistics must match the query");
  profile_.validate();
}

double CostEstimator::time(const VertexSetCost& c, std::uint64_t n, std::uint64_t map_slots) const {
  auto prof = profile_;
  prof.map_slots = map_slots;
  const auto& sel = c.by_n[n - 1];
  const auto m = map_task_count(static_cast<std::uint64_t>(sel.s_i), prof.block_size);
  return mrj_total_time(prof, sel.s_i, m, n, sel.alpha, sel.beta, sel.sigma).total;
}

const VertexSetCost& CostEstimator::cost(const std::vector<std::size_t>& rels) {
  if (auto it = memo_.find(rels); it != memo_.end()) return it->second;
  VertexSetCost c;
  c.conditions = induced_conditions(q_, rels);
  std::vector<std::uint64_t> cards;
  for (auto r : rels) cards.push_back(relations_[r].cardinality());
  c.cube = CubeConfig::for_cardinalities(cards);
  c.k_r_choice = choose_k_r(c.cube, options_.lambda, options_.k_p);
  const JobInputs job{&q_, rels, c.conditions};
  c.selectivity = estimate_join_selectivity(job, relations_, stats_, options_.seed);
  for (std::uint64_t n = 1; n <= c.k_r_choice.k_r; ++n) {
    auto sel = c.selectivity;
    apply_partition(sel, job, relations_, stats_, build_partition(c.cube, n), ids_);
    c.by_n.push_back(sel);
  }
  c.selectivity = c.by_n.front();
  for (std::uint64_t n = 1; n <= c.k_r_choice.k_r; ++n) {
    c.t_by_n.push_back(time(c, n, profile_.map_slots));
    if (n == 1 || c.t_by_n.back() < c.w) {
      c.w = c.t_by_n.back();
      c.s = n;
    }
  }
  return memo_.emplace(rels, std::move(c)).first->second;
}

std::pair<std::vector<double>, std::vector<std::uint64_t>> CostEstimator::tau(const std::vector<std::size_t>& rels) {
  const auto& c = cost(rels);
  std::vector<double> t;
  std::vector<std::uint64_t> k;
  for (std::uint64_t a = 1; a <= options_.k_p; ++a) {
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_n = 1;
    for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(a, c.k_r_choice.k_r); ++n) {
      const double x = time(c, n, a);
      if (x < best) {
        best = x;
        best_n = n;
      }
    }
    t.push_back(best);
    k.push_back(best_n);
  }
  return {t, k};
}

PrunedJoinPathGraph build_pruned_graph(const JoinGraph& g, CostEstimator& costs, const PlannerOptions& options) {
  if (options.max_len < 1) throw ParameterError("max path length must be at least 1");
  if (!g.is_connected()) throw ConnectivityError("join graph is not connected");
  auto candidates = enumerate_candidates(g, options.pairwise ? 1 : options.max_len);
  for (auto& c : candidates) {
    const auto& vc = costs.cost(c.relations);
    c.w = vc.w;
    c.s = vc.s;
    c.k_r_cap = vc.k_r_choice.k_r;
  }
  std::vector<int> universe;
  for (const auto& e : g.edges()) universe.push_back(e.theta);
  std::sort(universe.begin(), universe.end());
  return prune_candidates(std::move(candidates), std::move(universe));
}

std::vector<PlannedMerge> build_merge_tree(const std::vector<std::vector<std::size_t>>& job_relations,
                                           const std::vector<double>& job_rows, std::span<const Relation> relations,
                                           const Profile& profile) {
  struct Node {
    std::vector<std::size_t> relations;
    double rows;
  };
  std::vector<Node> nodes;
  for (std::size_t j = 0; j < job_relations.size(); ++j) {
    auto r = job_relations[j];
    std::sort(r.begin(), r.end());
    nodes.push_back({r, job_rows.at(j)});
  }
  auto bytes = [](const Node& n) { return n.rows * static_cast<double>(8 * n.relations.size()); };
  std::vector<std::size_t> active(nodes.size());
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<PlannedMerge> out;
  while (active.size() > 1) {
    bool found = false;
    PlannedMerge best;
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const auto& l = nodes[active[x]];
        const auto& r = nodes[active[y]];
        std::vector<std::size_t> shared;
        std::set_intersection(l.relations.begin(), l.relations.end(), r.relations.begin(), r.relations.end(),
                              std::back_inserter(shared));
        if (shared.empty()) continue;
        double denom = 1.0;
        for (auto s : shared) denom *= std::max<double>(1.0, static_cast<double>(relations[s].cardinality()));
        const double est = l.rows * r.rows / denom;
        if (found && !(est < best.estimated_rows)) continue;
        found = true;
        best = {};
        best.left = active[x];
        best.right = active[y];
        best.keys = shared;
        std::set_union(l.relations.begin(), l.relations.end(), r.relations.begin(), r.relations.end(),
                       std::back_inserter(best.relations));
        best.estimated_rows = est;
        best.duration = profile.merge_c * (bytes(l) + bytes(r));
        best_a = x;
        best_b = y;
      }
    if (!found) throw PlanConsistencyError("job outputs share no relation to merge on");
    nodes.push_back({best.relations, best.estimated_rows});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
    active.push_back(nodes.size() - 1);
    out.push_back(std::move(best));
  }
  return out;
}

PlannerResult plan_query_detailed(const Query& q, std::span<const Relation> relations,
                                  std::span<const RelationStats> stats, const GlobalIds& ids, const Profile& profile,
                                  const PlannerOptions& options) {
  if (options.k_p < 1) throw ParameterError("worker budget must be at least 1");
  if (options.max_len < 1) throw ParameterError("max path length must be at least 1");
  if (!(options.lambda >= 0.0 && options.lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  const auto g = build_join_graph(q);
  CostEstimator costs(q, relations, stats, ids, profile, options);

  PlannerResult out;
  out.graph = build_pruned_graph(g, costs, options);
  out.cover = select_cover(out.graph);

  auto& plan = out.plan;
  plan.k_p = options.k_p;
  plan.seed = options.seed;
  std::vector<MalleableJob> mj;
  std::vector<std::vector<std::size_t>> job_relations;
  std::vector<double> job_rows;
  for (auto i : out.cover) {
    const auto& c = out.graph.candidates[i];
    const auto& vc = costs.cost(c.relations);
    PlannedJob job;
    job.spec.relations = c.relations;
    job.spec.conditions = vc.conditions;
    job.spec.cube = vc.cube;
    job.path = c.path;
    job.residual = c.residual;
    job.k_r_cap = c.k_r_cap;
    job.w = c.w;
    job.s = c.s;
    std::tie(job.tau, job.tau_k_r) = costs.tau(c.relations);
    mj.push_back({job.tau});
    job_relations.push_back(c.relations);
    job_rows.push_back(vc.selectivity.output_rows);
    plan.jobs.push_back(std::move(job));
  }
  plan.merges = build_merge_tree(job_relations, job_rows, relations, profile);
  plan.schedule = schedule_malleable(mj, plan.merge_nodes(), plan.k_p);
  plan.makespan = plan.schedule.makespan;
  for (std::size_t j = 0; j < plan.jobs.size(); ++j) {
    auto& job = plan.jobs[j];
    const auto a = plan.schedule.jobs[j].allotment;
    job.spec.k_r = job.tau_k_r[a - 1];
    job.selectivity = costs.cost(job.spec.relations).by_n[job.spec.k_r - 1];
  }
  if (!plan_is_sufficient(q, plan)) throw PlanConsistencyError("plan leaves a join condition unevaluated");
  return out;
}

ExecutionPlan plan_query(const Query& q, std::span<const Relation> relations, std::span<const RelationStats> stats,
                         const GlobalIds& ids, const Profile& profile, const PlannerOptions& options) {
  return plan_query_detailed(q, relations, stats, ids, profile, options).plan;
}

bool plan_is_sufficient(const Query& q, const ExecutionPlan& plan) {
  std::vector<bool> seen(q.conditions.size(), false);
  for (const auto& j : plan.jobs)
    for (int id : j.spec.conditions)
      if (id >= 1 && static_cast<std::size_t>(id) <= seen.size()) seen[static_cast<std::size_t>(id - 1)] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace thetajoin
