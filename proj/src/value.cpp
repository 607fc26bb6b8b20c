#include "thetajoin/value.hpp"

#include <charconv>
#include <chrono>
#include <cmath>

namespace thetajoin {

std::string_view to_string(AttrType type) {
  switch (type) {
    case AttrType::Integer:
      return "integer";
    case AttrType::Decimal:
      return "decimal";
    case AttrType::String:
      return "string";
    case AttrType::DateTime:
      return "datetime";
  }
  return "?";
}

std::optional<AttrType> parse_attr_type(std::string_view text) {
  if (text == "integer" || text == "int") return AttrType::Integer;
  if (text == "decimal" || text == "double") return AttrType::Decimal;
  if (text == "string") return AttrType::String;
  if (text == "datetime" || text == "date-time" || text == "date") return AttrType::DateTime;
  return std::nullopt;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less:
      return "<";
    case CompareOp::LessEqual:
      return "<=";
    case CompareOp::Equal:
      return "=";
    case CompareOp::GreaterEqual:
      return ">=";
    case CompareOp::Greater:
      return ">";
    case CompareOp::NotEqual:
      return "<>";
  }
  return "?";
}

std::optional<CompareOp> parse_compare_op(std::string_view text) {
  if (text == "<") return CompareOp::Less;
  if (text == "<=") return CompareOp::LessEqual;
  if (text == "=") return CompareOp::Equal;
  if (text == ">=") return CompareOp::GreaterEqual;
  if (text == ">") return CompareOp::Greater;
  if (text == "<>") return CompareOp::NotEqual;
  return std::nullopt;
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

std::optional<int> fixed_digits(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
    v = v * 10 + (text[i] - '0');
  }
  return v;
}

}  // namespace

std::optional<std::int64_t> parse_datetime(std::string_view text) {
  if (auto epoch = parse_int(text)) return epoch;
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 10 && text.size() != 19) return std::nullopt;
  auto y = fixed_digits(text, 0, 4);
  auto mo = fixed_digits(text, 5, 2);
  auto d = fixed_digits(text, 8, 2);
  if (!y || !mo || !d || text[4] != '-' || text[7] != '-') return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t seconds = std::chrono::sys_days{ymd}.time_since_epoch() / std::chrono::seconds{1};
  if (text.size() == 19) {
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    auto h = fixed_digits(text, 11, 2);
    auto mi = fixed_digits(text, 14, 2);
    auto s = fixed_digits(text, 17, 2);
    if (!h || !mi || !s || text[13] != ':' || text[16] != ':') return std::nullopt;
    if (*h > 23 || *mi > 59 || *s > 60) return std::nullopt;
    seconds += *h * 3600 + *mi * 60 + *s;
  }
  return seconds;
}

std::optional<Value> parse_value(std::string_view text, AttrType type) {
  switch (type) {
    case AttrType::Integer:
      if (auto v = parse_int(text)) return Value{*v};
      return std::nullopt;
    case AttrType::Decimal:
      if (auto v = parse_double(text)) return Value{*v};
      return std::nullopt;
    case AttrType::String:
      return Value{std::string(text)};
    case AttrType::DateTime:
      if (auto v = parse_datetime(text)) return Value{*v};
      return std::nullopt;
  }
  return std::nullopt;
}

std::string render_value(const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, ptr);
  }
  return std::get<std::string>(value);
}

std::uint64_t value_bytes(const Value& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return 4 + s->size();
  return 8;
}

bool is_numeric(AttrType type) { return type != AttrType::String; }

bool comparable(AttrType a, AttrType b) { return is_numeric(a) == is_numeric(b); }

namespace {

template <class T>
bool apply(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::Less:
      return a < b;
    case CompareOp::LessEqual:
      return a <= b;
    case CompareOp::Equal:
      return a == b;
    case CompareOp::GreaterEqual:
      return a >= b;
    case CompareOp::Greater:
      return a > b;
    case CompareOp::NotEqual:
      return a != b;
  }
  return false;
}

double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

}  // namespace

bool evaluate(CompareOp op, const Value& lhs, std::int64_t lhs_offset, const Value& rhs,
              std::int64_t rhs_offset) {
  const auto* li = std::get_if<std::int64_t>(&lhs);
  const auto* ri = std::get_if<std::int64_t>(&rhs);
  if (li && ri) {
    const __int128 a = static_cast<__int128>(*li) + lhs_offset;
    const __int128 b = static_cast<__int128>(*ri) + rhs_offset;
    return apply(op, a, b);
  }
  const auto* ls = std::get_if<std::string>(&lhs);
  const auto* rs = std::get_if<std::string>(&rhs);
  if (ls || rs) {
    if (!ls || !rs) return false;
    return apply(op, *ls, *rs);
  }
  return apply(op, as_double(lhs) + static_cast<double>(lhs_offset),
               as_double(rhs) + static_cast<double>(rhs_offset));
}

bool value_less(const Value& a, const Value& b) {
  if (a.index() != b.index()) {
    if (a.index() != 2 && b.index() != 2) return as_double(a) < as_double(b);
    return a.index() < b.index();
  }
  return a < b;
}

}  // namespace thetajoin
