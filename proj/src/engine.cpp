#include "thetajoin/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <unistd.h>

#include "thetajoin/errors.hpp"

namespace thetajoin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CompareOp flip(CompareOp op) {
  switch (op) {
    case CompareOp::Less:
      return CompareOp::Greater;
    case CompareOp::LessEqual:
      return CompareOp::GreaterEqual;
    case CompareOp::Greater:
      return CompareOp::Less;
    case CompareOp::GreaterEqual:
      return CompareOp::LessEqual;
    default:
      return op;
  }
}

// A condition seen from the dimension being bound: new.attr + new_off op
// bound.attr + bound_off.
struct Check {
  std::size_t new_attr = 0;
  std::int64_t new_off = 0;
  CompareOp op = CompareOp::Equal;
  std::size_t bound_rel = 0;  // query relation index
  std::size_t bound_attr = 0;
  std::int64_t bound_off = 0;
};

struct Level {
  std::size_t dim = 0;  // job axis
  std::size_t rel = 0;  // query relation index
  std::vector<Check> checks;
  int driving = -1;  // index into checks used for range pruning
};

// Binding order in which every relation after the first is tied to an
// earlier one by at least one condition when the job's graph allows it.
std::vector<Level> binding_order(const Query& q, const JobSpec& job) {
  const std::size_t m = job.relations.size();
  std::vector<bool> placed(m, false);
  std::vector<Level> levels;
  auto dim_of = [&](std::size_t rel) -> std::ptrdiff_t {
    for (std::size_t d = 0; d < m; ++d)
      if (job.relations[d] == rel) return static_cast<std::ptrdiff_t>(d);
    return -1;
  };
  for (std::size_t step = 0; step < m; ++step) {
    // Prefer the unplaced dim with the most conditions to placed dims.
    std::size_t best = m;
    int best_links = -1;
    for (std::size_t d = 0; d < m; ++d) {
      if (placed[d]) continue;
      int links = 0;
      for (int id : job.conditions) {
        const auto& c = q.conditions[static_cast<std::size_t>(id - 1)];
        const auto l = dim_of(c.left.attr.relation), r = dim_of(c.right.attr.relation);
        if ((l == static_cast<std::ptrdiff_t>(d) && r >= 0 && placed[static_cast<std::size_t>(r)]) ||
            (r == static_cast<std::ptrdiff_t>(d) && l >= 0 && placed[static_cast<std::size_t>(l)]))
          ++links;
      }
      if (links > best_links) {
        best = d;
        best_links = links;
      }
    }
    placed[best] = true;
    Level lv;
    lv.dim = best;
    lv.rel = job.relations[best];
    for (int id : job.conditions) {
      const auto& c = q.conditions[static_cast<std::size_t>(id - 1)];
      const auto l = dim_of(c.left.attr.relation), r = dim_of(c.right.attr.relation);
      if (l == static_cast<std::ptrdiff_t>(best) && r >= 0 && placed[static_cast<std::size_t>(r)] &&
          r != static_cast<std::ptrdiff_t>(best))
        lv.checks.push_back({c.left.attr.attribute, c.left.offset, c.op, c.right.attr.relation,
                             c.right.attr.attribute, c.right.offset});
      else if (r == static_cast<std::ptrdiff_t>(best) && l >= 0 && placed[static_cast<std::size_t>(l)] &&
               l != static_cast<std::ptrdiff_t>(best))
        lv.checks.push_back({c.right.attr.attribute, c.right.offset, flip(c.op), c.left.attr.relation,
                             c.left.attr.attribute, c.left.offset});
    }
    for (std::size_t i = 0; i < lv.checks.size(); ++i)
      if (lv.checks[i].op != CompareOp::NotEqual) {
        lv.driving = static_cast<int>(i);
        break;
      }
    levels.push_back(std::move(lv));
  }
  return levels;
}

struct ReduceResult {
  std::vector<std::uint64_t> ids;  // row-major, job axis order
  std::uint64_t checked = 0;
  std::uint64_t qualifying = 0;
  std::uint64_t emitted = 0;
  bool spilled = false;
};

class Reducer {
 public:
  Reducer(const std::vector<Level>& levels, std::span<const Relation> relations, const GlobalIds& ids,
          const JobSpec& job, const PartitionAssignment& pa, std::uint64_t component,
          std::vector<std::vector<std::size_t>> rows)
      : levels_(levels), relations_(relations), ids_(ids), job_(job), pa_(pa), component_(component),
        rows_(std::move(rows)), bound_(relations.size(), 0), cell_(job.relations.size()) {
    // Sort each level's rows on its driving attribute.
    for (const auto& lv : levels_) {
      if (lv.driving < 0) continue;
      const auto attr = lv.checks[static_cast<std::size_t>(lv.driving)].new_attr;
      const auto& rel = relations_[lv.rel];
      std::stable_sort(rows_[lv.dim].begin(), rows_[lv.dim].end(), [&](std::size_t a, std::size_t b) {
        return value_less(rel[a].values[attr], rel[b].values[attr]);
      });
    }
  }

  ReduceResult run() {
    for (const auto& r : rows_)
      if (r.empty()) return std::move(out_);
    descend(0);
    return std::move(out_);
  }

 private:
  bool passes(const Level& lv, const Tuple& t) const {
    for (const auto& c : lv.checks) {
      const auto& other = relations_[c.bound_rel][bound_[c.bound_rel]];
      if (!evaluate(c.op, t.values[c.new_attr], c.new_off, other.values[c.bound_attr], c.bound_off)) return false;
    }
    return true;
  }

  std::pair<std::size_t, std::size_t> range(const Level& lv) const {
    const auto& rows = rows_[lv.dim];
    if (lv.driving < 0) return {0, rows.size()};
    const auto& c = lv.checks[static_cast<std::size_t>(lv.driving)];
    const auto& rel = relations_[lv.rel];
    const Value& y = relations_[c.bound_rel][bound_[c.bound_rel]].values[c.bound_attr];
    auto holds = [&](CompareOp op) {
      return [&, op](std::size_t row) { return evaluate(op, rel[row].values[c.new_attr], c.new_off, y, c.bound_off); };
    };
    auto first_false = [&](CompareOp op) {
      return static_cast<std::size_t>(std::partition_point(rows.begin(), rows.end(), holds(op)) - rows.begin());
    };
    auto first_true = [&](CompareOp op) {
      auto pred = holds(op);
      return static_cast<std::size_t>(
          std::partition_point(rows.begin(), rows.end(), [&](std::size_t r) { return !pred(r); }) - rows.begin());
    };
    switch (c.op) {
      case CompareOp::Less:
      case CompareOp::LessEqual:
        return {0, first_false(c.op)};
      case CompareOp::Greater:
      case CompareOp::GreaterEqual:
        return {first_true(c.op), rows.size()};
      case CompareOp::Equal:
        return {first_false(CompareOp::Less), first_false(CompareOp::LessEqual)};
      default:
        return {0, rows.size()};
    }
  }

  void descend(std::size_t k) {
    if (k == levels_.size()) {
      ++out_.qualifying;
      for (std::size_t d = 0; d < job_.relations.size(); ++d) {
        const auto rel = job_.relations[d];
        cell_[d] = cell_of_tuple(ids_.id_of_row(rel, bound_[rel]), job_.cube.cardinalities[d], job_.cube.eta);
      }
      if (pa_.owner_of_cell(cell_) != component_) return;
      ++out_.emitted;
      for (std::size_t d = 0; d < job_.relations.size(); ++d) {
        const auto rel = job_.relations[d];
        out_.ids.push_back(ids_.id_of_row(rel, bound_[rel]));
      }
      return;
    }
    const auto& lv = levels_[k];
    const auto& rows = rows_[lv.dim];
    const auto& rel = relations_[lv.rel];
    const auto [lo, hi] = range(lv);
    for (std::size_t i = lo; i < hi; ++i) {
      ++out_.checked;
      const auto row = rows[i];
      if (!passes(lv, rel[row])) continue;
      bound_[lv.rel] = row;
      descend(k + 1);
    }
  }

  const std::vector<Level>& levels_;
  std::span<const Relation> relations_;
  const GlobalIds& ids_;
  const JobSpec& job_;
  const PartitionAssignment& pa_;
  std::uint64_t component_;
  std::vector<std::vector<std::size_t>> rows_;
  std::vector<std::size_t> bound_;
  std::vector<std::uint32_t> cell_;
  ReduceResult out_;
};

std::atomic<std::uint64_t> spill_counter{0};

// Writes a reducer's input to disk and reads it back, releasing memory in
// between. Returns the bytes written.
std::uint64_t spill_round_trip(std::vector<std::vector<std::size_t>>& rows, const std::filesystem::path& dir) {
  const auto path = dir / ("thetajoin-spill-" + std::to_string(::getpid()) + "-" + std::to_string(spill_counter++));
  std::uint64_t written = 0;
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open spill file " + path.string());
    for (auto& r : rows) {
      const std::uint64_t n = r.size();
      out.write(reinterpret_cast<const char*>(&n), sizeof n);
      out.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(n * sizeof(std::size_t)));
      written += sizeof n + n * sizeof(std::size_t);
      std::vector<std::size_t>().swap(r);
    }
    if (!out) throw Error("failed writing spill file " + path.string());
  }
  {
    std::ifstream in(path, std::ios::binary);
    for (auto& r : rows) {
      std::uint64_t n = 0;
      in.read(reinterpret_cast<char*>(&n), sizeof n);
      r.resize(n);
      in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(n * sizeof(std::size_t)));
    }
    if (!in) throw Error("failed reading spill file " + path.string());
  }
  std::filesystem::remove(path);
  return written;
}

void check_job(const Query& q, const JobSpec& job, std::span<const Relation> relations, const GlobalIds& ids) {
  if (job.relations.size() < 2) throw PlanConsistencyError("a job joins at least two relations");
  if (job.cube.dims() != job.relations.size()) throw PlanConsistencyError("job cube does not match its relations");
  if (relations.size() != q.relations.size() || ids.relation_count() != q.relations.size())
    throw PlanConsistencyError("relation list does not match the query");
  for (std::size_t d = 0; d < job.relations.size(); ++d) {
    const auto rel = job.relations.at(d);
    if (rel >= relations.size()) throw PlanConsistencyError("job references an unknown relation");
    if (job.cube.cardinalities[d] != relations[rel].cardinality() || ids.cardinality(rel) != relations[rel].cardinality())
      throw PlanConsistencyError("job cube cardinality does not match relation " + relations[rel].name());
  }
  for (int id : job.conditions) {
    if (id < 1 || static_cast<std::size_t>(id) > q.conditions.size())
      throw PlanConsistencyError("job references unknown condition " + std::to_string(id));
    const auto& c = q.conditions[static_cast<std::size_t>(id - 1)];
    for (auto rel : {c.left.attr.relation, c.right.attr.relation})
      if (std::find(job.relations.begin(), job.relations.end(), rel) == job.relations.end())
        throw PlanConsistencyError("condition " + std::to_string(id) + " reaches outside its job");
  }
}

}  // namespace

void canonicalize(JobOutput& out) {
  const std::size_t w = out.width();
  std::vector<std::size_t> perm(w);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return out.relations[a] < out.relations[b]; });
  std::vector<std::vector<std::uint64_t>> rows(out.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].resize(w);
    for (std::size_t c = 0; c < w; ++c) rows[i][c] = out.ids[i * w + perm[c]];
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::size_t> rels(w);
  for (std::size_t c = 0; c < w; ++c) rels[c] = out.relations[perm[c]];
  out.relations = std::move(rels);
  out.ids.clear();
  for (const auto& r : rows) out.ids.insert(out.ids.end(), r.begin(), r.end());
}

std::uint64_t count_duplicates(const JobOutput& out) {
  std::vector<std::vector<std::uint64_t>> rows;
  rows.reserve(out.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) rows.emplace_back(out.row(i).begin(), out.row(i).end());
  std::sort(rows.begin(), rows.end());
  std::uint64_t dup = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i] == rows[i - 1]) ++dup;
  return dup;
}

JobRun run_mrj(const Query& q, const JobSpec& job, std::span<const Relation> relations, const GlobalIds& ids,
               ThreadPool& pool, std::uint64_t allotment, const EngineOptions& options) {
  check_job(q, job, relations, ids);
  if (allotment < 1) throw ParameterError("allotment must be at least 1");
  if (options.block_size == 0) throw ParameterError("block size must be positive");
  const auto t0 = Clock::now();
  const PartitionAssignment pa(job.cube, job.k_r);
  const std::size_t m = job.relations.size();

  JobRun run;
  auto& rep = run.report;
  rep.relations = job.relations;
  rep.conditions = job.conditions;
  rep.k_r = job.k_r;
  rep.allotment = allotment;

  // Map tasks: contiguous row ranges of at most block_size bytes.
  struct MapTask {
    std::size_t dim, begin, end;
  };
  std::vector<MapTask> tasks;
  for (std::size_t d = 0; d < m; ++d) {
    const auto& rel = relations[job.relations[d]];
    rep.input_bytes += rel.total_bytes();
    std::size_t begin = 0;
    std::uint64_t acc = 0;
    for (std::size_t row = 0; row < rel.cardinality(); ++row) {
      const auto b = rel.tuple_bytes(row);
      if (acc > 0 && acc + b > options.block_size) {
        tasks.push_back({d, begin, row});
        begin = row;
        acc = 0;
      }
      acc += b;
    }
    if (begin < rel.cardinality()) tasks.push_back({d, begin, rel.cardinality()});
  }

  std::vector<std::vector<std::vector<std::size_t>>> map_out(tasks.size());
  rep.map_seconds.assign(tasks.size(), 0.0);
  parallel_for(pool, tasks.size(), allotment, [&](std::size_t i) {
    const auto ts = Clock::now();
    const auto& t = tasks[i];
    const auto rel = job.relations[t.dim];
    auto& buckets = map_out[i];
    buckets.assign(job.k_r, {});
    for (std::size_t row = t.begin; row < t.end; ++row)
      for (auto c : pa.components_for_tuple(t.dim, ids.id_of_row(rel, row))) buckets[c].push_back(row);
    rep.map_seconds[i] = seconds_since(ts);
  });

  // Shuffle barrier: gather per component in task order.
  rep.emissions_per_relation.assign(m, 0);
  rep.reducer_input_bytes.assign(job.k_r, 0);
  rep.reducer_input_tuples.assign(job.k_r, 0);
  std::vector<std::vector<std::vector<std::size_t>>> inputs(job.k_r, std::vector<std::vector<std::size_t>>(m));
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto d = tasks[i].dim;
    const auto& rel = relations[job.relations[d]];
    for (std::uint64_t c = 0; c < job.k_r; ++c) {
      auto& src = map_out[i][c];
      rep.emissions_per_relation[d] += src.size();
      rep.reducer_input_tuples[c] += src.size();
      for (auto row : src) rep.reducer_input_bytes[c] += rel.tuple_bytes(row);
      auto& dst = inputs[c][d];
      dst.insert(dst.end(), src.begin(), src.end());
      std::vector<std::size_t>().swap(src);
    }
  }
  rep.shuffle_bytes = std::accumulate(rep.reducer_input_bytes.begin(), rep.reducer_input_bytes.end(), std::uint64_t{0});

  const auto levels = binding_order(q, job);
  std::vector<ReduceResult> results(job.k_r);
  std::vector<std::uint64_t> spill_bytes(job.k_r, 0);
  rep.reduce_seconds.assign(job.k_r, 0.0);
  parallel_for(pool, job.k_r, allotment, [&](std::size_t c) {
    const auto ts = Clock::now();
    auto rows = std::move(inputs[c]);
    bool spilled = false;
    if (rep.reducer_input_bytes[c] > options.memory_cap) {
      spill_bytes[c] = spill_round_trip(rows, options.spill_dir);
      spilled = true;
    }
    Reducer r(levels, relations, ids, job, pa, c, std::move(rows));
    results[c] = r.run();
    results[c].spilled = spilled;
    rep.reduce_seconds[c] = seconds_since(ts);
  });

  run.output.relations = job.relations;
  for (std::uint64_t c = 0; c < job.k_r; ++c) {
    auto& r = results[c];
    rep.candidates_checked += r.checked;
    rep.qualifying += r.qualifying;
    rep.emitted += r.emitted;
    if (r.spilled) {
      ++rep.spilled_reducers;
      rep.spilled_bytes += spill_bytes[c];
    }
    run.output.ids.insert(run.output.ids.end(), r.ids.begin(), r.ids.end());
  }
  rep.duplicates = count_duplicates(run.output);
  rep.wall_seconds = seconds_since(t0);
  return run;
}

JobOutput run_merge(const JobOutput& left, const JobOutput& right, std::span<const std::size_t> keys) {
  if (keys.empty()) throw PlanConsistencyError("merge needs at least one shared relation");
  auto column = [](const JobOutput& o, std::size_t rel) -> std::size_t {
    for (std::size_t c = 0; c < o.width(); ++c)
      if (o.relations[c] == rel) return c;
    throw PlanConsistencyError("merge input lacks relation " + std::to_string(rel));
  };
  std::vector<std::size_t> lk, rk;
  for (auto k : keys) {
    lk.push_back(column(left, k));
    rk.push_back(column(right, k));
  }
  JobOutput out;
  out.relations = left.relations;
  std::vector<std::size_t> extra;
  for (std::size_t c = 0; c < right.width(); ++c)
    if (std::find(left.relations.begin(), left.relations.end(), right.relations[c]) == left.relations.end()) {
      out.relations.push_back(right.relations[c]);
      extra.push_back(c);
    }
  // Remaining shared columns beyond `keys` must also agree.
  std::vector<std::pair<std::size_t, std::size_t>> also;
  for (std::size_t c = 0; c < right.width(); ++c) {
    const auto rel = right.relations[c];
    if (std::find(keys.begin(), keys.end(), rel) != keys.end()) continue;
    for (std::size_t l = 0; l < left.width(); ++l)
      if (left.relations[l] == rel) also.emplace_back(l, c);
  }

  std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> index;
  std::vector<std::uint64_t> key(keys.size());
  for (std::size_t i = 0; i < right.rows(); ++i) {
    const auto r = right.row(i);
    for (std::size_t k = 0; k < keys.size(); ++k) key[k] = r[rk[k]];
    index[key].push_back(i);
  }
  for (std::size_t i = 0; i < left.rows(); ++i) {
    const auto l = left.row(i);
    for (std::size_t k = 0; k < keys.size(); ++k) key[k] = l[lk[k]];
    auto it = index.find(key);
    if (it == index.end()) continue;
    for (auto j : it->second) {
      const auto r = right.row(j);
      bool ok = true;
      for (auto [lc, rc] : also)
        if (l[lc] != r[rc]) ok = false;
      if (!ok) continue;
      out.ids.insert(out.ids.end(), l.begin(), l.end());
      for (auto c : extra) out.ids.push_back(r[c]);
    }
  }
  return out;
}

double measured_job_seconds(const JobReport& job, const Profile& profile, std::uint64_t allotment) {
  auto prof = profile;
  prof.map_slots = std::max<std::uint64_t>(1, allotment);
  const double s_i = static_cast<double>(job.input_bytes);
  const double alpha = s_i > 0 ? static_cast<double>(job.shuffle_bytes) / s_i : 0.0;
  const double out_bytes = static_cast<double>(job.emitted) * static_cast<double>(output_row_bytes(job.relations.size()));
  const double beta = job.shuffle_bytes ? out_bytes / static_cast<double>(job.shuffle_bytes) : 0.0;
  const double s_r = job.reducer_input_bytes.empty()
                         ? 0.0
                         : static_cast<double>(*std::max_element(job.reducer_input_bytes.begin(), job.reducer_input_bytes.end()));
  const auto m = map_task_count(job.input_bytes, prof.block_size);
  return mrj_cost_with_reduce_input(prof, s_i, m, job.k_r, alpha, beta, s_r).total;
}

double merge_seconds(double input_bytes, const Profile& profile) { return profile.merge_c * input_bytes; }

PlanRun run_plan(const Query& q, const ExecutionPlan& plan, std::span<const Relation> relations, const GlobalIds& ids,
                 const Profile& profile, const EngineOptions& options) {
  if (plan.jobs.empty()) throw PlanConsistencyError("plan has no jobs");
  if (plan.schedule.jobs.size() != plan.jobs.size()) throw PlanConsistencyError("plan schedule does not match its jobs");
  const auto t0 = Clock::now();
  ThreadPool pool(plan.k_p);
  PlanRun out;
  auto& rep = out.report;
  rep.k_p = plan.k_p;

  // Jobs start in schedule order; each keeps at most its allotment of
  // tasks in flight, and the pool bounds the total at k_p.
  const std::size_t n = plan.jobs.size();
  std::vector<JobRun> runs(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return plan.schedule.jobs[a].start < plan.schedule.jobs[b].start;
  });
  {
    std::vector<std::thread> coordinators;
    for (auto j : order)
      coordinators.emplace_back([&, j] {
        try {
          runs[j] = run_mrj(q, plan.jobs[j].spec, relations, ids, pool, plan.schedule.jobs[j].allotment, options);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    for (auto& t : coordinators) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<JobOutput> nodes;
  for (auto& r : runs) {
    rep.jobs.push_back(r.report);
    nodes.push_back(std::move(r.output));
  }
  for (const auto& m : plan.merges) {
    if (m.left >= nodes.size() || m.right >= nodes.size()) throw PlanConsistencyError("merge references a later node");
    const auto ts = Clock::now();
    MergeReport mr;
    mr.left = m.left;
    mr.right = m.right;
    mr.keys = m.keys;
    mr.input_bytes = nodes[m.left].bytes() + nodes[m.right].bytes();
    nodes.push_back(run_merge(nodes[m.left], nodes[m.right], m.keys));
    mr.rows = nodes.back().rows();
    mr.wall_seconds = seconds_since(ts);
    rep.merges.push_back(std::move(mr));
  }
  out.output = std::move(nodes.back());
  if (out.output.width() != q.relations.size())
    throw PlanConsistencyError("plan output does not cover every relation");
  canonicalize(out.output);
  rep.output_rows = out.output.rows();
  rep.max_concurrency = pool.max_concurrency();

  // Replay the schedule with cost-model times from measured quantities.
  std::vector<double> durations(n);
  std::vector<std::uint64_t> allot(n);
  for (std::size_t j = 0; j < n; ++j) {
    allot[j] = plan.schedule.jobs[j].allotment;
    durations[j] = measured_job_seconds(rep.jobs[j], profile, allot[j]);
  }
  std::vector<MergeNode> merges;
  for (std::size_t i = 0; i < plan.merges.size(); ++i)
    merges.push_back({plan.merges[i].left, plan.merges[i].right,
                      merge_seconds(static_cast<double>(rep.merges[i].input_bytes), profile)});
  rep.simulated_makespan = replay_schedule(durations, allot, order, merges, plan.k_p).makespan;
  rep.wall_seconds = seconds_since(t0);
  return out;
}

std::vector<ResultRow> project(const Query& q, const JobOutput& out, std::span<const Relation> relations,
                               const GlobalIds& ids) {
  std::vector<std::ptrdiff_t> column(q.relations.size(), -1);
  for (std::size_t c = 0; c < out.width(); ++c) column[out.relations[c]] = static_cast<std::ptrdiff_t>(c);
  for (const auto& p : q.projection)
    if (column[p.relation] < 0) throw PlanConsistencyError("projection needs relation " + q.relations[p.relation].name);
  std::vector<ResultRow> rows;
  rows.reserve(out.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto r = out.row(i);
    ResultRow row;
    for (const auto& p : q.projection) {
      const auto gid = r[static_cast<std::size_t>(column[p.relation])];
      row.push_back(relations[p.relation][ids.row_of_id(p.relation, gid)].values[p.attribute]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_rows(const std::vector<ResultRow>& rows) {
  std::string s;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += render_value(r[i]);
    }
    s += '\n';
  }
  return s;
}

JobOutput brute_force_join(const Query& q, std::span<const Relation> relations, const GlobalIds& ids) {
  const std::size_t n = q.relations.size();
  if (relations.size() != n) throw PlanConsistencyError("relation list does not match the query");
  double product = 1.0;
  for (const auto& r : relations) product *= static_cast<double>(r.cardinality());
  if (product > kOracleGuard)
    throw OracleGuardError("cross product of " + std::to_string(static_cast<unsigned long long>(product)) +
                           " combinations exceeds the oracle limit of 1e8");
  // Conditions become checkable once the later of their relations is bound.
  std::vector<std::vector<const ThetaCondition*>> at(n);
  for (const auto& c : q.conditions) at[std::max(c.left.attr.relation, c.right.attr.relation)].push_back(&c);

  JobOutput out;
  out.relations.resize(n);
  std::iota(out.relations.begin(), out.relations.end(), std::size_t{0});
  std::vector<std::size_t> rows(n, 0);
  std::function<void(std::size_t)> loop = [&](std::size_t k) {
    if (k == n) {
      for (std::size_t r = 0; r < n; ++r) out.ids.push_back(ids.id_of_row(r, rows[r]));
      return;
    }
    for (std::size_t row = 0; row < relations[k].cardinality(); ++row) {
      rows[k] = row;
      bool ok = true;
      for (const auto* c : at[k]) {
        const auto l = c->left.attr.relation, r = c->right.attr.relation;
        if (!condition_holds(*c, relations[l][rows[l]], relations[r][rows[r]])) {
          ok = false;
          break;
        }
      }
      if (ok) loop(k + 1);
    }
  };
  loop(0);
  canonicalize(out);
  return out;
}

}  // namespace thetajoin
