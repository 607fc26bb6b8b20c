#include "thetajoin/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "thetajoin/errors.hpp"
#include "thetajoin/rng.hpp"

namespace thetajoin {

namespace {

constexpr CompareOp kOps[] = {CompareOp::Less,         CompareOp::LessEqual, CompareOp::Equal,
                              CompareOp::GreaterEqual, CompareOp::Greater,   CompareOp::NotEqual};

std::string relation_name(std::size_t i) { return "R" + std::to_string(i + 1); }

Relation make_relation(const std::string& name, std::uint64_t rows, bool with_decimal, std::int64_t domain,
                       std::mt19937_64& rng) {
  std::vector<Attribute> attrs{{"a", AttrType::Integer}, {"b", AttrType::Integer}};
  if (with_decimal) attrs.push_back({"c", AttrType::Decimal});
  std::uniform_int_distribution<std::int64_t> ints(0, domain);
  std::uniform_int_distribution<int> quarters(0, static_cast<int>(domain) * 4);
  std::vector<Tuple> tuples(rows);
  for (auto& t : tuples) {
    t.values.emplace_back(ints(rng));
    t.values.emplace_back(ints(rng));
    if (with_decimal) t.values.emplace_back(quarters(rng) / 4.0);
  }
  return Relation(name, Schema(attrs), std::move(tuples));
}

Workload assemble(std::vector<Relation> rels, const std::string& joins) {
  std::string text;
  std::vector<Schema> schemas;
  for (const auto& r : rels) {
    text += "RELATION " + r.name() + " FROM \"" + r.name() + ".csv\";\n";
    schemas.push_back(r.schema());
  }
  auto q = parse_query(text + joins, schemas);
  return {std::move(rels), std::move(q)};
}

}  // namespace

Workload random_workload(std::uint64_t seed, const RandomWorkloadShape& shape) {
  if (shape.min_relations < 2 || shape.max_relations < shape.min_relations)
    throw ParameterError("relation count range is invalid");
  std::mt19937_64 rng(mix_seed(seed, 11));
  const auto m = std::uniform_int_distribution<std::size_t>(shape.min_relations, shape.max_relations)(rng);
  const auto cap = std::min<std::uint64_t>(
      shape.max_tuples,
      static_cast<std::uint64_t>(std::floor(std::pow(shape.max_cross_product, 1.0 / static_cast<double>(m)))));
  std::uniform_int_distribution<std::uint64_t> size(std::max<std::uint64_t>(1, cap / 2), std::max<std::uint64_t>(1, cap));
  std::vector<Relation> rels;
  for (std::size_t i = 0; i < m; ++i) {
    const auto rows = size(rng);
    const bool decimal = rng() % 3 == 0;
    rels.push_back(make_relation(relation_name(i), rows, decimal, shape.domain, rng));
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < m; ++i) edges.emplace_back(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng), i);
  const auto extra = std::uniform_int_distribution<std::size_t>(0, shape.max_extra_edges)(rng);
  for (std::size_t e = 0; e < extra; ++e) {
    const auto u = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    auto v = std::uniform_int_distribution<std::size_t>(0, m - 2)(rng);
    if (v >= u) ++v;
    edges.emplace_back(u, v);
  }
  std::shuffle(edges.begin(), edges.end(), rng);

  std::size_t op = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
  std::string joins;
  auto operand = [&](std::size_t r) {
    const auto cols = rels[r].schema().size();
    std::string s = relation_name(r) + "." + rels[r].schema()[rng() % cols].name;
    const auto off = std::uniform_int_distribution<int>(-3, 3)(rng);
    if (off > 0) s += " + " + std::to_string(off);
    if (off < 0) s += " - " + std::to_string(-off);
    return s;
  };
  for (auto [u, v] : edges) {
    if (rng() % 2) std::swap(u, v);
    const auto lhs = operand(u);
    const auto rhs = operand(v);
    joins += "JOIN " + lhs + " " + std::string(to_string(kOps[op++ % 6])) + " " + rhs + ";\n";
  }
  return assemble(std::move(rels), joins);
}

Workload cycle_workload(std::uint64_t seed, std::uint64_t tuples) {
  std::mt19937_64 rng(mix_seed(seed, 12));
  std::vector<Relation> rels;
  const std::int64_t domain = static_cast<std::int64_t>(tuples) * 4;
  for (std::size_t i = 0; i < 6; ++i) rels.push_back(make_relation(relation_name(i), tuples, false, domain, rng));
  // Equalities keep intermediate results near linear in the input; the two
  // band conditions are genuine theta joins.
  const std::string joins =
      "JOIN R1.a = R2.a;\n"
      "JOIN R5.a = R2.b;\n"
      "JOIN R1.b < R3.a + 8;\n"
      "JOIN R3.b = R4.a;\n"
      "JOIN R6.a = R5.b;\n"
      "JOIN R4.b >= R6.b;\n";
  return assemble(std::move(rels), joins);
}

Workload flip_condition(const Workload& w, int theta) {
  if (theta < 1 || static_cast<std::size_t>(theta) > w.query.conditions.size())
    throw ParameterError("no condition " + std::to_string(theta) + " to flip");
  Workload out = w;
  auto& op = out.query.conditions[static_cast<std::size_t>(theta - 1)].op;
  switch (op) {
    case CompareOp::Less: op = CompareOp::GreaterEqual; break;
    case CompareOp::LessEqual: op = CompareOp::Greater; break;
    case CompareOp::Equal: op = CompareOp::NotEqual; break;
    case CompareOp::GreaterEqual: op = CompareOp::Less; break;
    case CompareOp::Greater: op = CompareOp::LessEqual; break;
    case CompareOp::NotEqual: op = CompareOp::Equal; break;
  }
  return out;
}

}  // namespace thetajoin
