#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thetajoin/relation.hpp"
#include "thetajoin/value.hpp"

namespace thetajoin {

struct AttrRef {
  std::size_t relation = 0;  // index into Query::relations
  std::size_t attribute = 0;
  friend bool operator==(const AttrRef&, const AttrRef&) = default;
};

// One side of a condition: an attribute plus a constant integer offset.
struct Operand {
  AttrRef attr;
  std::int64_t offset = 0;
  friend bool operator==(const Operand&, const Operand&) = default;
};

// `left op right`, labelled with its 1-based id in source order.
struct ThetaCondition {
  int id = 0;
  Operand left;
  CompareOp op = CompareOp::Equal;
  Operand right;
  friend bool operator==(const ThetaCondition&, const ThetaCondition&) = default;
};

struct RelationDecl {
  std::string name;
  std::string path;
  friend bool operator==(const RelationDecl&, const RelationDecl&) = default;
};

struct Query {
  std::vector<RelationDecl> relations;
  std::vector<Schema> schemas;  // parallel to `relations`
  std::vector<ThetaCondition> conditions;
  std::vector<AttrRef> projection;

  std::size_t relation_index(std::string_view name) const;  // throws QueryError
  std::string attr_name(const AttrRef& ref) const;           // "rel.attr"
};

// Unresolved syntax tree of a query file.
struct AttrName {
  std::string relation;
  std::string attribute;
};

struct OperandSource {
  AttrName attr;
  std::int64_t offset = 0;
};

struct ConditionSource {
  OperandSource left;
  CompareOp op = CompareOp::Equal;
  OperandSource right;
};

struct QuerySource {
  std::vector<RelationDecl> relations;
  std::vector<ConditionSource> conditions;
  std::vector<AttrName> projection;  // empty means every attribute
};

// Syntax only; throws QueryError on malformed statements or operators.
QuerySource parse_query_source(std::string_view text);

// Resolves names against `relations` (parallel to `source.relations`),
// type-checks every condition, numbers conditions 1..n, and checks that the
// join graph is connected.
Query bind_query(const QuerySource& source, std::span<const Schema> schemas);
Query parse_query(std::string_view text, std::span<const Schema> schemas);

// Checks the Query invariants; throws QueryError / ConnectivityError.
void validate_query(const Query& query);

std::string render_query(const Query& query);

bool condition_holds(const ThetaCondition& cond, const Tuple& left, const Tuple& right);

}  // namespace thetajoin
