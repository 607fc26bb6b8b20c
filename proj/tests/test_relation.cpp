#include <sstream>

#include "doctest.h"
#include "thetajoin/errors.hpp"
#include "thetajoin/relation.hpp"

using namespace thetajoin;

namespace {

Relation read(const std::string& text) {
  std::istringstream in(text);
  return read_relation(in, "R");
}

}  // namespace

TEST_CASE("three data rows load with cardinality 3") {
  auto r = read("id:integer,bt:integer\n1,10\n2,20\n3,30\n");
  CHECK(r.cardinality() == 3);
  CHECK(r.schema().size() == 2);
  CHECK(std::get<std::int64_t>(r[2].values[1]) == 30);
  CHECK(r.total_bytes() == 3 * 16);
}

TEST_CASE("header-only and empty files are empty relations") {
  CHECK_THROWS_AS(read("id:integer\n"), EmptyRelationError);
  CHECK_THROWS_AS(read(""), EmptyRelationError);
}

TEST_CASE("type mismatch names the data row") {
  try {
    read("id:integer\nx\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 1);
  }
  try {
    read("id:integer,s:string\n1,a\n2,b,c\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("malformed headers are schema errors") {
  CHECK_THROWS_AS(read("id\n1\n"), SchemaError);
  CHECK_THROWS_AS(read("id:blob\n1\n"), SchemaError);
  CHECK_THROWS_AS(read("id:integer,id:integer\n1,2\n"), SchemaError);
  CHECK_THROWS_AS(read("1x:integer\n1\n"), SchemaError);
}

TEST_CASE("all four attribute types parse") {
  auto r = read("a:integer,b:decimal,c:string,d:datetime\r\n-4,2.5,hello,2020-01-02T03:04:05\r\n\n");
  REQUIRE(r.cardinality() == 1);
  CHECK(std::get<std::int64_t>(r[0].values[0]) == -4);
  CHECK(std::get<double>(r[0].values[1]) == doctest::Approx(2.5));
  CHECK(std::get<std::string>(r[0].values[2]) == "hello");
  CHECK(std::get<std::int64_t>(r[0].values[3]) == 1577934245);
}

TEST_CASE("write then read round trips") {
  auto r = read("a:integer,s:string\n1,x\n2,y\n");
  std::ostringstream out;
  write_relation(out, r);
  auto back = read(out.str());
  CHECK(back.schema() == r.schema());
  REQUIRE(back.cardinality() == 2);
  CHECK(back[1].values == r[1].values);
}

TEST_CASE("datetime formats") {
  CHECK(parse_datetime("0") == 0);
  CHECK(parse_datetime("1970-01-02") == 86400);
  CHECK(parse_datetime("1970-01-01 00:01:00") == 60);
  CHECK(parse_datetime("1970-01-01T00:00:01Z") == 1);
  CHECK_FALSE(parse_datetime("1970-13-01").has_value());
  CHECK_FALSE(parse_datetime("yesterday").has_value());
}

TEST_CASE("evaluate applies offsets and mixed numerics") {
  CHECK(evaluate(CompareOp::Less, Value{std::int64_t{5}}, 3, Value{std::int64_t{9}}, 0));
  CHECK_FALSE(evaluate(CompareOp::Less, Value{std::int64_t{6}}, 3, Value{std::int64_t{9}}, 0));
  CHECK(evaluate(CompareOp::Equal, Value{std::int64_t{2}}, 0, Value{2.0}, 0));
  CHECK(evaluate(CompareOp::NotEqual, Value{std::string("a")}, 0, Value{std::string("b")}, 0));
  CHECK(evaluate(CompareOp::GreaterEqual, Value{INT64_MAX}, 1, Value{INT64_MAX}, 0));
}
