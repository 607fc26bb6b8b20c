#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thetajoin/calibration.hpp"
#include "thetajoin/engine.hpp"
#include "thetajoin/errors.hpp"
#include "thetajoin/oracle_suite.hpp"
#include "thetajoin/planner.hpp"
#include "thetajoin/render.hpp"
#include "thetajoin/rng.hpp"

namespace thetajoin::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Config {
  std::string query;
  std::string data_dir;
  std::uint64_t k_p = 4;
  std::string calibration;
  double lambda = kDefaultLambda;
  std::uint64_t seed = 1;
  std::size_t max_len = 6;
  std::string baseline;
  double sample_rate = 0.2;
  bool fresh_stats = false;
  bool verify = false;
  std::string report;
  std::string out;
  std::string dump_partition;
  std::uint64_t memory_cap = 256ull << 20;
  // calibrate
  bool quick = false;
  std::string scratch;
  // oracle-check
  std::size_t count = 50;
  std::uint64_t max_tuples = 200;
  bool inject_flip = false;
};

struct Loaded {
  Query query;
  std::vector<Relation> relations;
  std::vector<RelationStats> stats;
  GlobalIds ids;
  Profile profile;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("failed writing " + p.string());
}

Profile load_config_profile(const Config& c) {
  if (c.calibration.empty()) return default_profile(c.k_p);
  return load_profile(c.calibration);
}

Loaded load(const Config& c, std::ostream& err) {
  Loaded l;
  const fs::path query_path(c.query);
  const auto source = parse_query_source(read_file(query_path));
  const fs::path base = c.data_dir.empty() ? query_path.parent_path() : fs::path(c.data_dir);
  std::vector<Schema> schemas;
  std::vector<fs::path> files;
  for (const auto& decl : source.relations) {
    fs::path p(decl.path);
    if (p.is_relative()) p = base / p;
    files.push_back(p);
    l.relations.push_back(load_relation(p, decl.name));
    schemas.push_back(l.relations.back().schema());
  }
  l.query = bind_query(source, schemas);

  std::vector<std::uint64_t> cards;
  for (std::size_t i = 0; i < l.relations.size(); ++i) {
    const auto& r = l.relations[i];
    const auto stats_seed = mix_seed(c.seed, 500 + i);
    std::optional<RelationStats> cached;
    if (!c.fresh_stats) cached = load_stats(r, files[i], c.sample_rate, stats_seed);
    if (cached) {
      l.stats.push_back(std::move(*cached));
    } else {
      l.stats.push_back(sample_relation(r, c.sample_rate, stats_seed));
      try {
        save_stats(l.stats.back(), r, files[i]);
      } catch (const std::exception& e) {
        err << "warning: statistics not cached: " << e.what() << "\n";
      }
    }
    cards.push_back(r.cardinality());
  }
  l.ids = GlobalIds(cards, c.seed);
  l.profile = load_config_profile(c);
  return l;
}

PlannerOptions planner_options(const Config& c) {
  PlannerOptions o;
  o.k_p = c.k_p;
  o.lambda = c.lambda;
  o.max_len = c.max_len;
  o.seed = c.seed;
  o.pairwise = c.baseline == "pairwise";
  return o;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_file(path, text);
}

int cmd_plan(const Config& c, bool explain, std::ostream& out, std::ostream& err) {
  const auto l = load(c, err);
  const auto o = planner_options(c);
  const auto r = plan_query_detailed(l.query, l.relations, l.stats, l.ids, l.profile, o);
  emit(c.out, explain ? render_explain(l.query, r, c.lambda) : render_plan(l.query, r.plan), out);
  if (!c.dump_partition.empty()) write_file(c.dump_partition, partition_json(l.query, r.plan));
  return 0;
}

int cmd_run(const Config& c, std::ostream& out, std::ostream& err) {
  const auto l = load(c, err);
  const auto plan = plan_query(l.query, l.relations, l.stats, l.ids, l.profile, planner_options(c));
  if (!c.dump_partition.empty()) write_file(c.dump_partition, partition_json(l.query, plan));
  EngineOptions eo;
  eo.block_size = l.profile.block_size;
  eo.memory_cap = c.memory_cap;
  PlanRun run;
  try {
    run = run_plan(l.query, plan, l.relations, l.ids, l.profile, eo);
  } catch (const std::exception& e) {
    if (!c.report.empty()) {
      nlohmann::json j{{"error", e.what()}, {"plan", render_plan(l.query, plan)}};
      write_file(c.report, j.dump(2) + "\n");
    }
    throw;
  }
  emit(c.out, render_rows(project(l.query, run.output, l.relations, l.ids)), out);
  if (!c.report.empty()) write_file(c.report, report_json(l.query, plan, run.report));
  err << "rows " << run.output.rows() << ", wall " << run.report.wall_seconds << " s, simulated "
      << run.report.simulated_makespan << " s\n";
  if (!c.verify) return 0;
  try {
    const auto oracle = brute_force_join(l.query, l.relations, l.ids);
    const bool match = oracle.relations == run.output.relations && oracle.ids == run.output.ids;
    err << (match ? "MATCH" : "MISMATCH") << " (" << run.output.rows() << " rows, oracle " << oracle.rows() << ")\n";
    return match ? 0 : 1;
  } catch (const OracleGuardError& e) {
    err << "warning: verification skipped: " << e.what() << "\n";
    return 0;
  }
}

int cmd_calibrate(const Config& c, std::ostream& out) {
  CalibrationOptions o;
  o.quick = c.quick;
  o.map_slots = c.k_p;
  if (!c.scratch.empty()) o.scratch_dir = c.scratch;
  const auto run = calibrate(o);
  const std::string path = c.out.empty() ? "calibration.json" : c.out;
  save_profile(run.profile, path);
  out << "wrote " << path << (run.profile.low_confidence ? " (low confidence)" : "") << "\n";
  out << "c1 " << run.profile.c1 * kMiB << " s/MiB, c2 " << run.profile.c2 * kMiB << " s/MiB\n";
  out << "p:";
  for (auto [x, y] : run.profile.p.knots()) out << " " << x / kMiB << "MiB=" << y * kMiB;
  out << "\nq:";
  for (auto [x, y] : run.profile.q.knots()) out << " " << x << "=" << y;
  out << "\n";
  return 0;
}

int cmd_oracle_check(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.count == 0) {
    err << "warning: no queries requested, vacuous pass\n";
    out << "oracle-check: 0/0 passed\n";
    return 0;
  }
  OracleSuiteOptions o;
  o.count = c.count;
  o.seed = c.seed;
  o.k_p = c.k_p;
  o.sample_rate = c.sample_rate;
  o.inject_flip = c.inject_flip;
  o.shape.max_tuples = c.max_tuples;
  const auto r = run_oracle_suite(o, load_config_profile(c));
  for (const auto& k : r.cases) {
    if (k.match && k.duplicates == 0 && k.shuffle_matches_score) continue;
    out << "MISMATCH seed " << k.seed << ": " << k.relations << " relations, " << k.conditions << " conditions, rows "
        << k.rows << " vs oracle " << k.oracle_rows << ", duplicates " << k.duplicates
        << (k.shuffle_matches_score ? "" : ", shuffle differs from score") << (k.error.empty() ? "" : ", " + k.error)
        << "\n";
  }
  const auto passed = r.passed();
  out << "oracle-check: " << passed << "/" << r.cases.size() << " passed, " << r.duplicates()
      << " duplicate combinations, operators";
  for (std::size_t i = 0; i < r.operator_counts.size(); ++i)
    out << " " << to_string(static_cast<CompareOp>(i)) << ":" << r.operator_counts[i];
  out << "\n";
  return passed == r.cases.size() ? 0 : 1;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-way theta-join planner and executor"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("query", c.query, "Query file")->required();
    s->add_option("--data-dir", c.data_dir, "Directory for relative relation paths (default: the query's)");
    s->add_option("--calibration", c.calibration, "Calibration profile");
    s->add_option("--lambda", c.lambda, "Score weight of the reduce-count optimizer")->check(CLI::Range(0.0, 1.0));
    s->add_option("--max-len", c.max_len, "Longest path considered, in edges")->check(CLI::PositiveNumber);
    s->add_option("--baseline", c.baseline, "Restrict the plan: pairwise")->check(CLI::IsMember({"pairwise"}));
    s->add_option("--sample-rate", c.sample_rate, "Sampling rate for statistics")->check(CLI::Range(1e-6, 1.0));
    s->add_flag("--fresh-stats", c.fresh_stats, "Resample instead of using cached statistics");
    s->add_option("--out", c.out, "Output file (default stdout)");
    s->add_option("--dump-partition", c.dump_partition, "Write each job's partition as JSON");
  };
  auto budget = [&](CLI::App* s) {
    s->add_option("--k-p", c.k_p, "Worker budget")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "Seed for sampling and global ids");
  };

  auto* plan = app.add_subcommand("plan", "Print the execution plan");
  common(plan);
  budget(plan);
  auto* explain = app.add_subcommand("explain", "Print the plan with pruning witnesses and reduce-count sweeps");
  common(explain);
  budget(explain);
  auto* run = app.add_subcommand("run", "Plan and execute a query");
  common(run);
  budget(run);
  run->add_flag("--verify", c.verify, "Compare with the nested-loop answer");
  run->add_option("--report", c.report, "Write the run report as JSON");
  run->add_option("--memory-cap", c.memory_cap, "Reducer input bytes kept in memory")->check(CLI::PositiveNumber);
  auto* cal = app.add_subcommand("calibrate", "Measure a cost profile on this machine");
  budget(cal);
  cal->add_flag("--quick", c.quick, "Three knots per table, marked low confidence");
  cal->add_option("--out", c.out, "Profile path (default calibration.json)");
  cal->add_option("--scratch", c.scratch, "Scratch directory for write probes");
  auto* oc = app.add_subcommand("oracle-check", "Random queries checked against the nested-loop answer");
  budget(oc);
  oc->add_option("--count", c.count, "Number of queries");
  oc->add_option("--max-tuples", c.max_tuples, "Largest relation")->check(CLI::PositiveNumber);
  oc->add_option("--sample-rate", c.sample_rate, "Sampling rate for statistics")->check(CLI::Range(1e-6, 1.0));
  oc->add_option("--calibration", c.calibration, "Calibration profile");
  oc->add_flag("--inject-flip", c.inject_flip, "Negate condition 1 before planning (harness check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return cmd_plan(c, false, out, err);
    if (explain->parsed()) return cmd_plan(c, true, out, err);
    if (run->parsed()) return cmd_run(c, out, err);
    if (cal->parsed()) return cmd_calibrate(c, out);
    if (oc->parsed()) return cmd_oracle_check(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace thetajoin::cli
