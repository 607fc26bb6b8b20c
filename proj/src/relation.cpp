#include "thetajoin/relation.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "thetajoin/errors.hpp"
#include "thetajoin/text.hpp"

namespace thetajoin {

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  if (attributes_.empty()) throw SchemaError("schema needs at least one attribute");
  std::set<std::string_view> seen;
  for (const auto& a : attributes_) {
    if (!is_identifier(a.name)) throw SchemaError("invalid attribute name '" + a.name + "'");
    if (!seen.insert(a.name).second) throw SchemaError("duplicate attribute '" + a.name + "'");
  }
}

Schema Schema::parse(std::string_view header) {
  std::vector<Attribute> attrs;
  for (auto field : split(header, ',')) {
    field = trim(field);
    const auto colon = field.find(':');
    if (colon == std::string_view::npos)
      throw SchemaError("header field '" + std::string(field) + "' lacks ':type'");
    const auto name = trim(field.substr(0, colon));
    const auto type_text = trim(field.substr(colon + 1));
    const auto type = parse_attr_type(type_text);
    if (!type) throw SchemaError("unknown attribute type '" + std::string(type_text) + "'");
    attrs.push_back({std::string(name), *type});
  }
  return Schema(std::move(attrs));
}

std::string Schema::render() const {
  std::string out;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (i) out += ',';
    out += attributes_[i].name;
    out += ':';
    out += to_string(attributes_[i].type);
  }
  return out;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (attributes_[i].name == name) return i;
  return std::nullopt;
}

Relation::Relation(std::string name, Schema schema, std::vector<Tuple> tuples)
    : name_(std::move(name)), schema_(std::move(schema)), tuples_(std::move(tuples)) {
  row_bytes_.reserve(tuples_.size());
  for (std::size_t r = 0; r < tuples_.size(); ++r) {
    const auto& t = tuples_[r];
    if (t.values.size() != schema_.size())
      throw RowError(r + 1, "expected " + std::to_string(schema_.size()) + " values, got " +
                                std::to_string(t.values.size()));
    std::uint64_t bytes = 0;
    for (std::size_t a = 0; a < t.values.size(); ++a) {
      const bool is_string = std::holds_alternative<std::string>(t.values[a]);
      const bool is_double = std::holds_alternative<double>(t.values[a]);
      const AttrType type = schema_[a].type;
      const bool ok = type == AttrType::String    ? is_string
                      : type == AttrType::Decimal ? is_double
                                                  : std::holds_alternative<std::int64_t>(t.values[a]);
      if (!ok) throw RowError(r + 1, "value for '" + schema_[a].name + "' is not " +
                                         std::string(to_string(type)));
      bytes += value_bytes(t.values[a]);
    }
    row_bytes_.push_back(bytes);
    total_bytes_ += bytes;
  }
}

Relation read_relation(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyRelationError("relation '" + name + "' is empty");
  strip_cr(line);
  Schema schema = Schema::parse(line);

  std::vector<Tuple> tuples;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split(line, ',');
    if (fields.size() != schema.size())
      throw RowError(row, "expected " + std::to_string(schema.size()) + " fields, got " +
                              std::to_string(fields.size()));
    Tuple t;
    t.values.reserve(fields.size());
    for (std::size_t a = 0; a < fields.size(); ++a) {
      const auto text = schema[a].type == AttrType::String ? fields[a] : trim(fields[a]);
      auto v = parse_value(text, schema[a].type);
      if (!v)
        throw RowError(row, "'" + std::string(text) + "' is not a valid " +
                                std::string(to_string(schema[a].type)) + " for '" + schema[a].name +
                                "'");
      t.values.push_back(std::move(*v));
    }
    tuples.push_back(std::move(t));
  }
  if (tuples.empty()) throw EmptyRelationError("relation '" + name + "' has no tuples");
  return Relation(std::move(name), std::move(schema), std::move(tuples));
}

Relation load_relation(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation file " + path.string());
  return read_relation(in, std::move(name));
}

void write_relation(std::ostream& out, const Relation& relation) {
  out << relation.schema().render() << '\n';
  for (const auto& t : relation.tuples()) {
    for (std::size_t a = 0; a < t.values.size(); ++a) {
      if (a) out << ',';
      out << render_value(t.values[a]);
    }
    out << '\n';
  }
}

}  // namespace thetajoin
