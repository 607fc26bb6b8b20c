#include "thetajoin/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "thetajoin/errors.hpp"
#include "thetajoin/rng.hpp"

namespace thetajoin {

double estimate_distinct(std::uint64_t sample_size, std::uint64_t distinct_in_sample, std::uint64_t singletons,
                         std::uint64_t cardinality) {
  if (sample_size == 0) return 0.0;
  const double n = static_cast<double>(sample_size);
  const double q = n / static_cast<double>(cardinality);
  const double denom = 1.0 - (1.0 - q) * static_cast<double>(singletons) / n;
  double d = static_cast<double>(distinct_in_sample);
  if (denom > 0.0) d /= denom;
  return std::clamp(d, static_cast<double>(distinct_in_sample), static_cast<double>(cardinality));
}

RelationStats sample_relation(const Relation& r, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ParameterError("sample rate must lie in (0, 1]");
  RelationStats s;
  s.relation = r.name();
  s.cardinality = r.cardinality();
  s.bytes_total = r.total_bytes();
  s.rate = rate;
  s.seed = seed;

  const auto n = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(r.cardinality())));
  std::vector<std::size_t> all(r.cardinality());
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (n >= all.size()) {
    s.sample_rows = std::move(all);
  } else {
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(s.sample_rows), n, rng);
  }

  for (std::size_t a = 0; a < r.schema().size(); ++a) {
    AttributeStats as;
    as.name = r.schema()[a].name;
    std::vector<Value> values;
    values.reserve(s.sample_rows.size());
    for (auto row : s.sample_rows) values.push_back(r[row].values[a]);
    std::sort(values.begin(), values.end(), value_less);
    if (!values.empty()) {
      as.min = values.front();
      as.max = values.back();
    }
    std::uint64_t distinct = 0, singletons = 0;
    for (std::size_t i = 0; i < values.size();) {
      std::size_t j = i + 1;
      while (j < values.size() && !value_less(values[i], values[j])) ++j;
      ++distinct;
      if (j - i == 1) ++singletons;
      i = j;
    }
    as.distinct = estimate_distinct(values.size(), distinct, singletons, s.cardinality);
    s.attributes.push_back(std::move(as));
  }
  return s;
}

bool conditions_hold(const Query& q, std::span<const int> conds, std::span<const Relation> relations,
                     std::span<const std::size_t> rows) {
  for (int id : conds) {
    const auto& c = q.conditions[static_cast<std::size_t>(id - 1)];
    const auto l = c.left.attr.relation, r = c.right.attr.relation;
    if (!condition_holds(c, relations[l][rows[l]], relations[r][rows[r]])) return false;
  }
  return true;
}

JobSelectivity estimate_join_selectivity(const JobInputs& job, std::span<const Relation> relations,
                                         std::span<const RelationStats> stats, std::uint64_t seed) {
  const Query& q = *job.query;
  const std::size_t m = job.relations.size();
  for (int id : job.conditions) {
    const auto& c = q.conditions.at(static_cast<std::size_t>(id - 1));
    for (auto rel : {c.left.attr.relation, c.right.attr.relation})
      if (std::find(job.relations.begin(), job.relations.end(), rel) == job.relations.end())
        throw ParameterError("condition " + std::to_string(id) + " references a relation outside the job");
  }

  JobSelectivity out;
  double product = 1.0;
  for (auto rel : job.relations) {
    const auto& st = stats[rel];
    if (st.cardinality > 0 && st.sample_rows.empty())
      throw EstimationError("empty sample for nonempty relation " + st.relation);
    out.s_i += static_cast<double>(st.bytes_total);
    product *= static_cast<double>(st.cardinality);
  }

  // Joint selectivity over the cross product of samples.
  std::vector<std::size_t> rows(q.relations.size(), 0);
  double space = 1.0;
  for (auto rel : job.relations) space *= static_cast<double>(stats[rel].sample_rows.size());
  std::uint64_t hits = 0;
  if (space <= static_cast<double>(kMaxSampleCombinations)) {
    std::vector<std::size_t> pos(m, 0);
    const auto total = static_cast<std::uint64_t>(space);
    for (std::uint64_t n = 0; n < total; ++n) {
      for (std::size_t d = 0; d < m; ++d) rows[job.relations[d]] = stats[job.relations[d]].sample_rows[pos[d]];
      if (conditions_hold(q, job.conditions, relations, rows)) ++hits;
      for (std::size_t d = 0; d < m; ++d) {
        if (++pos[d] < stats[job.relations[d]].sample_rows.size()) break;
        pos[d] = 0;
      }
    }
    out.combinations_checked = total;
  } else {
    std::mt19937_64 rng(mix_seed(seed, 77));
    for (std::uint64_t n = 0; n < kMaxSampleCombinations; ++n) {
      for (std::size_t d = 0; d < m; ++d) {
        const auto& sr = stats[job.relations[d]].sample_rows;
        rows[job.relations[d]] = sr[std::uniform_int_distribution<std::size_t>(0, sr.size() - 1)(rng)];
      }
      if (conditions_hold(q, job.conditions, relations, rows)) ++hits;
    }
    out.combinations_checked = kMaxSampleCombinations;
    out.subsampled = true;
  }
  out.join_selectivity =
      out.combinations_checked ? static_cast<double>(hits) / static_cast<double>(out.combinations_checked) : 0.0;
  out.output_rows = out.join_selectivity * product;
  return out;
}

void apply_partition(JobSelectivity& out, const JobInputs& job, std::span<const Relation> relations,
                     std::span<const RelationStats> stats, const PartitionAssignment& pa, const GlobalIds& ids) {
  const std::size_t m = job.relations.size();
  if (pa.dims() != m) throw ParameterError("partition does not match the job's relations");
  // Map output includes every copy sent to a component.
  const auto score = partition_score(pa);
  double emitted = 0.0;
  for (std::size_t d = 0; d < m; ++d) {
    const auto& st = stats[job.relations[d]];
    if (st.cardinality == 0) continue;
    const double mean_cnt = static_cast<double>(score.per_dim_sums[d]) / static_cast<double>(st.cardinality);
    emitted += mean_cnt * static_cast<double>(st.bytes_total);
  }
  out.alpha = out.s_i > 0.0 ? emitted / out.s_i : 0.0;
  const double reduce_in = out.alpha * out.s_i;
  out.beta = reduce_in > 0.0 ? out.output_rows * static_cast<double>(output_row_bytes(m)) / reduce_in : 0.0;

  // Push the sample through the real partitioner and measure load spread.
  std::vector<double> load(pa.k_r(), 0.0);
  for (std::size_t d = 0; d < m; ++d) {
    const auto rel = job.relations[d];
    const auto& st = stats[rel];
    if (st.sample_rows.empty()) continue;
    const double scale = static_cast<double>(st.cardinality) / static_cast<double>(st.sample_rows.size());
    for (auto row : st.sample_rows) {
      const double bytes = static_cast<double>(relations[rel].tuple_bytes(row)) * scale;
      for (auto c : pa.components_for_tuple(d, ids.id_of_row(rel, row))) load[c] += bytes;
    }
  }
  const double mean = std::accumulate(load.begin(), load.end(), 0.0) / static_cast<double>(load.size());
  double var = 0.0;
  for (double l : load) var += (l - mean) * (l - mean);
  out.sigma = std::sqrt(var / static_cast<double>(load.size()));
}

JobSelectivity estimate_job_selectivity(const JobInputs& job, std::span<const Relation> relations,
                                        std::span<const RelationStats> stats, const PartitionAssignment& pa,
                                        const GlobalIds& ids, std::uint64_t seed) {
  if (pa.dims() != job.relations.size()) throw ParameterError("partition does not match the job's relations");
  auto out = estimate_join_selectivity(job, relations, stats, seed);
  apply_partition(out, job, relations, stats, pa, ids);
  return out;
}

namespace {

using nlohmann::json;

json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

Value value_from(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  return j.get<std::string>();
}

struct SourceStamp {
  std::uint64_t size = 0;
  std::int64_t mtime = 0;
};

SourceStamp stamp(const std::filesystem::path& p) {
  SourceStamp s;
  s.size = std::filesystem::file_size(p);
  s.mtime = std::filesystem::last_write_time(p).time_since_epoch().count();
  return s;
}

}  // namespace

std::filesystem::path stats_path(const std::filesystem::path& relation_file) {
  auto p = relation_file;
  p.replace_extension(".stats");
  return p;
}

void save_stats(const RelationStats& s, const Relation& r, const std::filesystem::path& relation_file) {
  json j;
  const auto st = stamp(relation_file);
  j["relation"] = s.relation;
  j["cardinality"] = s.cardinality;
  j["bytes_total"] = s.bytes_total;
  j["rate"] = s.rate;
  j["seed"] = s.seed;
  j["source_size"] = st.size;
  j["source_mtime"] = st.mtime;
  j["schema"] = r.schema().render();
  json attrs = json::array();
  for (const auto& a : s.attributes)
    attrs.push_back({{"name", a.name}, {"min", value_json(a.min)}, {"max", value_json(a.max)}, {"distinct", a.distinct}});
  j["attributes"] = attrs;
  j["sample_rows"] = s.sample_rows;
  std::ofstream out(stats_path(relation_file));
  if (!out) throw Error("cannot write " + stats_path(relation_file).string());
  out << j.dump() << "\n";
}

std::optional<RelationStats> load_stats(const Relation& r, const std::filesystem::path& relation_file, double rate,
                                        std::uint64_t seed) {
  const auto path = stats_path(relation_file);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    std::stringstream ss;
    ss << in.rdbuf();
    const auto j = json::parse(ss.str());
    const auto st = stamp(relation_file);
    if (j.at("rate").get<double>() != rate || j.at("seed").get<std::uint64_t>() != seed ||
        j.at("source_size").get<std::uint64_t>() != st.size || j.at("source_mtime").get<std::int64_t>() != st.mtime ||
        j.at("cardinality").get<std::uint64_t>() != r.cardinality() ||
        j.at("schema").get<std::string>() != r.schema().render())
      return std::nullopt;
    RelationStats s;
    s.relation = r.name();
    s.cardinality = r.cardinality();
    s.bytes_total = j.at("bytes_total").get<std::uint64_t>();
    s.rate = rate;
    s.seed = seed;
    for (const auto& a : j.at("attributes"))
      s.attributes.push_back({a.at("name").get<std::string>(), value_from(a.at("min")), value_from(a.at("max")),
                              a.at("distinct").get<double>()});
    s.sample_rows = j.at("sample_rows").get<std::vector<std::size_t>>();
    for (auto row : s.sample_rows)
      if (row >= r.cardinality()) return std::nullopt;
    return s;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace thetajoin
