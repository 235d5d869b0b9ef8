#include "doctest.h"

#include <clocale>
#include <sstream>

#include "freezing/config.hpp"
#include "freezing/csv.hpp"

using namespace freezing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("format_double round-trips and ignores the locale") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-10) == "-2.5e-10");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::setlocale(LC_ALL, "de_DE.UTF-8");
  CHECK(format_double(1.5) == "1.5");
  std::setlocale(LC_ALL, "C");
}

TEST_CASE("CsvWriter emits LF rows") {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.header({"a", "b", "c"});
  Vector v(2);
  v << 0.25, -1.0;
  csv.field(std::int64_t{3}).fields(v);
  csv.end_row();
  CHECK(out.str() == "a,b,c\n3,0.25,-1\n");
  CHECK(numbered("x", 3) == std::vector<std::string>{"x_1", "x_2", "x_3"});
}

TEST_CASE("git blob hash matches git hash-object") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  const Json a = Json::parse(R"({"b":1,"a":[1,2]})");
  const Json b = Json::parse(R"({"a":[1,2],"b":1})");
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("parse_generator and parse_schedule") {
  const auto g = parse_generator(Json::parse(R"({"complete_graph_theta":[0.5,0.5]})"));
  CHECK(g.q.dim() == 2);
  REQUIRE(g.theta.has_value());
  const auto h = parse_generator(Json::parse(R"({"dim":2,"q":[[-0.3,0.3],[0.2,-0.2]]})"));
  CHECK(h.q(1, 0) == 0.2);
  CHECK(code_of([] { parse_generator(Json::parse(R"({"dim":3,"q":[[-0.3,0.3],[0.2,-0.2]]})")); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { parse_generator(Json::parse(R"({"complete_graph_theta":[1,2,5]})")); }) ==
        ErrorCode::ConfigError);

  const auto s = parse_schedule(Json::parse(
      R"({"kind":"power_law","a":1.0,"theta":0.5,"remainder":{"A":1.0,"theta_r":1.0,"model":"zero"}})"));
  CHECK(s.p(4) == doctest::Approx(0.5));
  CHECK(s.remainder().is_zero());
  CHECK(parse_schedule(Json::parse(R"({"kind":"critical","a":2})")).p(10) == doctest::Approx(0.2));
  CHECK(parse_schedule(Json::parse(R"({"kind":"tabulated","values":[1,0.5,0.25]})")).p(3) == 0.25);
  const auto r = parse_schedule(
      Json::parse(R"({"kind":"power_law","a":1,"theta":0.5,"remainder":{"model":"uniform_power","c":0.5,"theta_r":0.5}})"));
  CHECK(r.remainder()(4, 0, 1) == doctest::Approx(0.25));
  CHECK(code_of([] { parse_schedule(Json::parse(R"({"kind":"power_law","a":-1,"theta":0.5})")); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { parse_schedule(Json::parse(R"({"kind":"nope"})")); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { get_or<double>(Json::parse(R"({"a":"x"})"), "a", 1.0); }) == ErrorCode::ConfigError);
}

TEST_CASE("manifest round trip") {
  const Json cfg = Json::parse(R"({"N":10,"seed":3})");
  const Json m = make_manifest("simulate-chain", cfg, 3, 2, {"chain.csv"});
  CHECK(m["config_hash"] == config_hash(cfg));
  CHECK(unwrap_manifest(m) == cfg);
  CHECK(unwrap_manifest(cfg) == cfg);
  CHECK(code_of([] { load_json_file("/nonexistent/config.json"); }) == ErrorCode::ConfigError);
}
