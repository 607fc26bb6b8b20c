#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thetajoin/value.hpp"

namespace thetajoin {

struct Attribute {
  std::string name;
  AttrType type;
};

class Schema {
 public:
  Schema() = default;
  // Throws SchemaError on an empty attribute list or duplicate names.
  explicit Schema(std::vector<Attribute> attributes);

  // Parses a header line of the form `name:type,name:type,...`.
  static Schema parse(std::string_view header);
  std::string render() const;

  std::size_t size() const { return attributes_.size(); }
  const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

inline bool operator==(const Attribute& a, const Attribute& b) {
  return a.name == b.name && a.type == b.type;
}

struct Tuple {
  std::vector<Value> values;
};

// An immutable, schema-typed tuple set. Row positions are stable and are
// the identity used by global-id permutations.
class Relation {
 public:
  Relation(std::string name, Schema schema, std::vector<Tuple> tuples);

  const std::string& name() const { return name_; }
  const Schema& schema() const { return schema_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  const Tuple& operator[](std::size_t row) const { return tuples_[row]; }
  std::uint64_t cardinality() const { return tuples_.size(); }

  std::uint64_t tuple_bytes(std::size_t row) const { return row_bytes_[row]; }
  std::uint64_t total_bytes() const { return total_bytes_; }

 private:
  std::string name_;
  Schema schema_;
  std::vector<Tuple> tuples_;
  std::vector<std::uint64_t> row_bytes_;
  std::uint64_t total_bytes_ = 0;
};

// Reads a relation file: a schema header line followed by one
// comma-separated tuple per line. Throws SchemaError, RowError, or
// EmptyRelationError.
Relation load_relation(const std::filesystem::path& path, std::string name);
Relation read_relation(std::istream& in, std::string name);

void write_relation(std::ostream& out, const Relation& relation);

}  // namespace thetajoin
