#include "thetajoin/query.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <set>

#include "thetajoin/errors.hpp"
#include "thetajoin/join_graph.hpp"
#include "thetajoin/text.hpp"

namespace thetajoin {

std::size_t Query::relation_index(std::string_view name) const {
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name == name) return i;
  throw QueryError("unknown relation '" + std::string(name) + "'");
}

std::string Query::attr_name(const AttrRef& ref) const {
  return relations[ref.relation].name + "." + schemas[ref.relation][ref.attribute].name;
}

namespace {

enum class Tok { Ident, Int, String, Op, Dot, Comma, Plus, Minus, End };

struct Token {
  Tok kind;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {Tok::End, ""};
    const char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, std::string(s_.substr(start, pos_ - start))};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const auto start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return {Tok::Int, std::string(s_.substr(start, pos_ - start))};
    }
    if (c == '"') {
      const auto end = s_.find('"', pos_ + 1);
      if (end == std::string_view::npos) throw QueryError("unterminated string literal");
      Token t{Tok::String, std::string(s_.substr(pos_ + 1, end - pos_ - 1))};
      pos_ = end + 1;
      return t;
    }
    ++pos_;
    switch (c) {
      case '.':
        return {Tok::Dot, "."};
      case ',':
        return {Tok::Comma, ","};
      case '+':
        return {Tok::Plus, "+"};
      case '-':
        return {Tok::Minus, "-"};
      default:
        break;
    }
    // Operators: greedily take the run of comparison punctuation.
    std::string op(1, c);
    while (pos_ < s_.size() && std::string_view("<>=!").find(s_[pos_]) != std::string_view::npos)
      op += s_[pos_++];
    return {Tok::Op, op};
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

class StatementParser {
 public:
  explicit StatementParser(std::string_view stmt) : lex_(stmt) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }
  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw QueryError(std::string("expected ") + what + " near '" + cur_.text + "'");
    return take();
  }
  void expect_end() {
    if (cur_.kind != Tok::End) throw QueryError("unexpected trailing '" + cur_.text + "'");
  }

  AttrName attr_name() {
    AttrName a;
    a.relation = expect(Tok::Ident, "relation name").text;
    expect(Tok::Dot, "'.'");
    a.attribute = expect(Tok::Ident, "attribute name").text;
    return a;
  }

  OperandSource operand() {
    OperandSource o;
    o.attr = attr_name();
    if (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const bool negative = take().kind == Tok::Minus;
      bool inner_negative = false;
      if (cur_.kind == Tok::Minus) {
        take();
        inner_negative = true;
      }
      const auto digits = expect(Tok::Int, "integer offset").text;
      std::int64_t v = 0;
      try {
        v = std::stoll(digits);
      } catch (const std::exception&) {
        throw QueryError("offset out of range: " + digits);
      }
      o.offset = (negative != inner_negative) ? -v : v;
    }
    return o;
  }

 private:
  void advance() { cur_ = lex_.next(); }
  Lexer lex_;
  Token cur_{Tok::End, ""};
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string strip_comments(std::string_view text) {
  std::string out;
  for (auto line : split(text, '\n')) {
    const auto t = trim(line);
    if (t.starts_with("--") || t.starts_with("#")) continue;
    out.append(line);
    out.push_back('\n');
  }
  return out;
}

std::vector<std::string> statements(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_string = false;
  for (char c : text) {
    if (c == '"') in_string = !in_string;
    if (c == ';' && !in_string) {
      if (!trim(cur).empty()) out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) throw QueryError("statement missing ';': " + std::string(trim(cur)));
  return out;
}

}  // namespace

QuerySource parse_query_source(std::string_view text) {
  QuerySource src;
  bool seen_select = false;
  for (const auto& stmt : statements(strip_comments(text))) {
    StatementParser p(stmt);
    const auto head = p.expect(Tok::Ident, "RELATION, JOIN, or SELECT");
    const auto kw = upper(head.text);
    if (kw == "RELATION") {
      RelationDecl d;
      d.name = p.expect(Tok::Ident, "relation name").text;
      const auto from = p.expect(Tok::Ident, "FROM");
      if (upper(from.text) != "FROM") throw QueryError("expected FROM after relation name");
      d.path = p.expect(Tok::String, "quoted path").text;
      p.expect_end();
      src.relations.push_back(std::move(d));
    } else if (kw == "JOIN") {
      ConditionSource c;
      c.left = p.operand();
      const auto op_tok = p.expect(Tok::Op, "comparison operator");
      const auto op = parse_compare_op(op_tok.text);
      if (!op) throw QueryError("unsupported operator '" + op_tok.text + "'");
      c.op = *op;
      c.right = p.operand();
      p.expect_end();
      src.conditions.push_back(std::move(c));
    } else if (kw == "SELECT") {
      if (seen_select) throw QueryError("more than one SELECT");
      seen_select = true;
      src.projection.push_back(p.attr_name());
      while (p.peek().kind == Tok::Comma) {
        p.take();
        src.projection.push_back(p.attr_name());
      }
      p.expect_end();
    } else {
      throw QueryError("unknown statement '" + head.text + "'");
    }
  }
  return src;
}

namespace {

AttrRef resolve(const Query& q, const AttrName& name) {
  const auto rel = q.relation_index(name.relation);
  const auto attr = q.schemas[rel].index_of(name.attribute);
  if (!attr)
    throw QueryError("unknown attribute '" + name.attribute + "' in relation '" + name.relation + "'");
  return {rel, *attr};
}

}  // namespace

void validate_query(const Query& q) {
  if (q.relations.size() < 2) throw QueryError("a join query needs at least two relations");
  if (q.schemas.size() != q.relations.size()) throw QueryError("schema list does not match relations");
  std::set<std::string_view> names;
  for (const auto& r : q.relations)
    if (!names.insert(r.name).second) throw QueryError("relation '" + r.name + "' declared twice");
  if (q.conditions.empty()) throw QueryError("query has no JOIN conditions");
  for (std::size_t i = 0; i < q.conditions.size(); ++i) {
    const auto& c = q.conditions[i];
    if (c.id != static_cast<int>(i + 1)) throw QueryError("conditions must be numbered 1..n");
    for (const auto* side : {&c.left, &c.right}) {
      if (side->attr.relation >= q.relations.size() ||
          side->attr.attribute >= q.schemas[side->attr.relation].size())
        throw QueryError("condition " + std::to_string(c.id) + " references an unknown attribute");
    }
    if (c.left.attr.relation == c.right.attr.relation)
      throw QueryError("condition " + std::to_string(c.id) + " must join two distinct relations");
    const auto lt = q.schemas[c.left.attr.relation][c.left.attr.attribute].type;
    const auto rt = q.schemas[c.right.attr.relation][c.right.attr.attribute].type;
    if (!comparable(lt, rt))
      throw QueryError("condition " + std::to_string(c.id) + " compares " +
                       std::string(to_string(lt)) + " with " + std::string(to_string(rt)));
    if (c.left.offset == INT64_MIN || c.right.offset == INT64_MIN)
      throw QueryError("condition " + std::to_string(c.id) + " offset out of range");
    if (lt == AttrType::String && (c.left.offset != 0 || c.right.offset != 0))
      throw QueryError("condition " + std::to_string(c.id) + " applies an offset to a string");
  }
  for (const auto& p : q.projection)
    if (p.relation >= q.relations.size() || p.attribute >= q.schemas[p.relation].size())
      throw QueryError("projection references an unknown attribute");
  if (!build_join_graph_unchecked(q).is_connected())
    throw ConnectivityError("join graph is disconnected; cross products are not planned");
}

Query bind_query(const QuerySource& source, std::span<const Schema> schemas) {
  if (schemas.size() != source.relations.size())
    throw QueryError("expected one schema per declared relation");
  Query q;
  q.relations = source.relations;
  q.schemas.assign(schemas.begin(), schemas.end());
  // Relation names must be unique before resolving references.
  std::set<std::string_view> names;
  for (const auto& r : q.relations)
    if (!names.insert(r.name).second) throw QueryError("relation '" + r.name + "' declared twice");

  int id = 0;
  for (const auto& cs : source.conditions) {
    ThetaCondition c;
    c.id = ++id;
    c.left = {resolve(q, cs.left.attr), cs.left.offset};
    c.op = cs.op;
    c.right = {resolve(q, cs.right.attr), cs.right.offset};
    q.conditions.push_back(c);
  }
  if (source.projection.empty()) {
    for (std::size_t r = 0; r < q.relations.size(); ++r)
      for (std::size_t a = 0; a < q.schemas[r].size(); ++a) q.projection.push_back({r, a});
  } else {
    for (const auto& p : source.projection) q.projection.push_back(resolve(q, p));
  }
  validate_query(q);
  return q;
}

Query parse_query(std::string_view text, std::span<const Schema> schemas) {
  return bind_query(parse_query_source(text), schemas);
}

namespace {

std::string render_operand(const Query& q, const Operand& o) {
  std::string s = q.attr_name(o.attr);
  if (o.offset > 0) s += " + " + std::to_string(o.offset);
  if (o.offset < 0) s += " - " + std::to_string(-o.offset);
  return s;
}

}  // namespace

std::string render_query(const Query& q) {
  std::string out;
  for (const auto& r : q.relations) out += "RELATION " + r.name + " FROM \"" + r.path + "\";\n";
  for (const auto& c : q.conditions)
    out += "JOIN " + render_operand(q, c.left) + " " + std::string(to_string(c.op)) + " " +
           render_operand(q, c.right) + ";\n";
  if (!q.projection.empty()) {
    out += "SELECT ";
    for (std::size_t i = 0; i < q.projection.size(); ++i) {
      if (i) out += ", ";
      out += q.attr_name(q.projection[i]);
    }
    out += ";\n";
  }
  return out;
}

bool condition_holds(const ThetaCondition& cond, const Tuple& left, const Tuple& right) {
  return evaluate(cond.op, left.values[cond.left.attr.attribute], cond.left.offset,
                  right.values[cond.right.attr.attribute], cond.right.offset);
}

}  // namespace thetajoin
