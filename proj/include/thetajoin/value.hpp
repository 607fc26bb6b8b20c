#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace thetajoin {

enum class AttrType { Integer, Decimal, String, DateTime };

std::string_view to_string(AttrType type);
std::optional<AttrType> parse_attr_type(std::string_view text);

// Date-time values are held as integer epoch seconds, so a Value only needs
// three alternatives.
using Value = std::variant<std::int64_t, double, std::string>;

enum class CompareOp { Less, LessEqual, Equal, GreaterEqual, Greater, NotEqual };

std::string_view to_string(CompareOp op);
std::optional<CompareOp> parse_compare_op(std::string_view text);

// Parses `text` as a value of `type`; nullopt on a type mismatch.
std::optional<Value> parse_value(std::string_view text, AttrType type);

// Accepts integer epoch seconds, YYYY-MM-DD, and YYYY-MM-DD[T ]HH:MM:SS[Z].
std::optional<std::int64_t> parse_datetime(std::string_view text);

std::string render_value(const Value& value);

// Bytes a value occupies in a materialized tuple: 8 for numerics, length
// plus a 4-byte length prefix for strings.
std::uint64_t value_bytes(const Value& value);

bool is_numeric(AttrType type);
bool comparable(AttrType a, AttrType b);

// Evaluates `(lhs + lhs_offset) op (rhs + rhs_offset)`. Offsets are ignored
// for strings (the query binder rejects them). Integer operands compare
// exactly; a decimal on either side promotes both to double.
bool evaluate(CompareOp op, const Value& lhs, std::int64_t lhs_offset,
              const Value& rhs, std::int64_t rhs_offset);

// Total order used for min/max statistics and canonical sorting.
bool value_less(const Value& a, const Value& b);

}  // namespace thetajoin
