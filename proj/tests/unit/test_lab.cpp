#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "sqfn/errors.hpp"
#include "sqfn/kernel_io.hpp"
#include "sqfn/report.hpp"
#include "sqfn/scenarios.hpp"
#include "sqfn/suite.hpp"

using namespace sqfn;
using nlohmann::json;

TEST_CASE("check records serialise with the report schema") {
  ExperimentReport rep;
  rep.scenario = "demo";
  rep.params = {{"k", 1}};
  rep.checks.push_back(relative_check("a", "x", 1.0, 1.0 + 1e-9, 1e-8, Provenance::DERIVED));
  rep.checks.push_back(custom_check("b", "y", 2.0, std::numeric_limits<double>::quiet_NaN(), 0.0,
                                    Provenance::TRIVIAL, true));
  rep.environment.seed = 11;
  json j = rep.to_json();
  CHECK(j["scenario"] == "demo");
  CHECK(j["params"]["k"] == 1);
  REQUIRE(j["checks"].size() == 2);
  const json& c = j["checks"][0];
  std::set<std::string> keys;
  for (auto it = c.begin(); it != c.end(); ++it) keys.insert(it.key());
  CHECK(keys == std::set<std::string>{"id", "anchor", "computed", "reference", "provenance", "tolerance", "pass"});
  CHECK(c["provenance"] == "DERIVED");
  CHECK(c["pass"] == true);
  CHECK(j["checks"][1]["reference"].is_null());
  CHECK(j["checks"][1]["provenance"] == "TRIVIAL");
  CHECK(j["environment"]["seed"] == 11);
  CHECK(j["environment"]["runtime_ms"] == 0.0);
  CHECK(j["verdict"] == true);
}

TEST_CASE("verdict is the conjunction of the checks") {
  ExperimentReport rep;
  CHECK(rep.verdict());
  rep.checks.push_back(absolute_check("a", "x", 1.0, 1.5, 0.6, Provenance::PAPER));
  CHECK(rep.verdict());
  rep.checks.push_back(absolute_check("b", "x", 1.0, 1.5, 0.4, Provenance::PAPER));
  CHECK_FALSE(rep.verdict());
  CHECK_FALSE(relative_check("c", "x", NAN, 1.0, 1.0, Provenance::DERIVED).pass);
}

TEST_CASE("CSV output round-trips numbers") {
  PlotTable t;
  t.columns = {"x", "y"};
  t.add({0.1, 1.0 / 3.0});
  t.add("row", {2.0});
  std::ostringstream out;
  write_csv(out, t);
  std::string s = out.str();
  CHECK(s.rfind("x,y\n", 0) == 0);
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(s.find("row,2") != std::string::npos);
}

TEST_CASE("fixture generator matches the standard engine") {
  FixtureRng a(7);
  std::mt19937_64 b(7);
  for (int i = 0; i < 5; ++i) CHECK(a.uniform() == double(b() >> 11) * 0x1p-53);
  FixtureRng c(3);
  for (int i = 0; i < 100; ++i) {
    long k = c.integer(-2, 2);
    CHECK(k >= -2);
    CHECK(k <= 2);
  }
}

TEST_CASE("suite selection") {
  std::vector<std::string> none;
  ExperimentReport e = run_suite(none);
  CHECK(e.checks.empty());
  CHECK(e.verdict());
  CHECK(e.scenario == "suite");

  std::vector<std::string> bad{"grid", "nope"};
  CHECK_THROWS_AS(run_suite(bad), ConfigError);

  std::vector<std::string> ab{"weights", "grid"}, ba{"grid", "weights", "grid"};
  json x = run_suite(ab).to_json(), y = run_suite(ba).to_json();
  CHECK(x["checks"] == y["checks"]);
  CHECK(x["checks"][0]["id"].get<std::string>().rfind("grid.", 0) == 0);
}

TEST_CASE("ex38 scenario has the five check groups") {
  std::vector<std::string> sel{"ex38"};
  ExperimentReport r = run_suite(sel);
  std::set<std::string> groups;
  for (const auto& c : r.checks) groups.insert(c.id.substr(0, 6));
  CHECK(groups == std::set<std::string>{"ex38.a", "ex38.b", "ex38.c", "ex38.d", "ex38.e"});
  CHECK(r.verdict());
}

TEST_CASE("scenario option errors") {
  RunOptions opt;
  opt.grid_h = std::ldexp(1.0, -20);
  CHECK_THROWS_AS(scenario_ex38(opt), CapacityError);
  Ex37Params p;
  p.q = 0.5;
  CHECK_THROWS_AS(scenario_ex37(p), ParameterError);
  CHECK_THROWS_AS(run_scenario("nope"), ConfigError);
}

TEST_CASE("kernel descriptions") {
  KernelDescription k = parse_kernel_description(
      json::parse(R"({"name": "mz", "m": 2, "n": 1, "kernel": {"builtin": "meanzero", "c0": 0.5},
                      "weights": [{"tag": "power", "a": 0.25}, {"tag": "const"}]})"));
  CHECK(k.spec.name == "mz");
  CHECK(k.spec.m == 2);
  REQUIRE(k.weights.size() == 2);
  CHECK(k.weights[0].power_exponent().value() == 0.25);
  CHECK_THROWS_AS(parse_kernel_description(json::parse(R"({"kernel": {"builtin": "nope"}})")), ConfigError);
  CHECK_THROWS_AS(parse_kernel_description(json::parse(R"({"kernel": {"builtin": "ex38"}, "extra": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_kernel_description(json::parse(R"({"m": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_kernel_description(json::parse(R"({"n": 2, "kernel": {"builtin": "ex38"}})")),
                  ConfigError);
  CHECK_THROWS_AS(load_kernel_description("/nonexistent/kernel.json"), ConfigError);
  CHECK_THROWS_AS(parse_beta("smooth"), ConfigError);
}
