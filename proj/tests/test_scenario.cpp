#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "combcalc/scenario.hpp"

using namespace combcalc;

namespace {

const std::filesystem::path scenarios = COMBCALC_SCENARIO_DIR;
const std::filesystem::path data = COMBCALC_TEST_DATA_DIR;

constexpr const char* minimal = R"(
[space]
dims = 1
[form f]
degree = 0
1 : x1^3
[domain unit]
x1 = 0 1
[run]
theorem = stokes
form = f
domain = unit
)";

template <class E>
E load_error(std::string_view text) {
    try {
        parse_scenario(text, "t");
    } catch (const E& e) {
        return e;
    }
    FAIL("expected an error");
    throw;
}

} // namespace

TEST_CASE("minimal scenario loads and runs") {
    const Scenario s = parse_scenario(minimal, "minimal");
    CHECK(s.name == "minimal");
    CHECK(s.space.n() == 1);
    CHECK(s.forms.size() == 1);
    REQUIRE(s.runs.size() == 1);
    CHECK(s.runs[0].order == 8);
    const auto results = run(s);
    REQUIRE(results.size() == 1);
    CHECK(results[0].ok());
    CHECK(std::abs(results[0].report.lhs - 1.0) <= 1e-12);
    CHECK(std::abs(results[0].report.rhs - 1.0) <= 1e-12);
}

TEST_CASE("load errors carry positions") {
    const auto dims = load_error<ScenarioError>("[space]\ndims = 3 3\nmhat = 1\n");
    CHECK(std::string(dims.what()).find("dims strictly increasing") != std::string::npos);
    CHECK(dims.line() == 2);

    const std::string dangling = std::string(minimal) + "[run]\ntheorem = stokes\nform = w9\ndomain = unit\n";
    const auto ref = load_error<ReferenceError>(dangling);
    CHECK(std::string(ref.what()).find("w9") != std::string::npos);

    const auto bad_expr = load_error<ScenarioError>("[space]\ndims = 2\n[form f]\ndegree = 0\n1 : x1 + * x2\n");
    CHECK(bad_expr.line() == 5);
    CHECK(bad_expr.column() == 10);

    CHECK(load_error<ScenarioError>("[space]\ndims = 2\n[form f]\ndegree = 1\ndx3 : 1\n").line() == 5);
    CHECK(load_error<ScenarioError>("[space]\ndims = 2\n[form f]\ndegree = 1\ndx1^dx2 : 1\n").line() == 5);
    CHECK(load_error<ScenarioError>("dims = 2\n").line() == 1);
    CHECK(load_error<ScenarioError>("[space]\ndims = 2\n[domain d]\nx1 = 1 0\n").line() == 4);
    CHECK(load_error<ScenarioError>("[space]\ndims = 2\n[form f]\ndegree = 0\n[form f]\ndegree = 0\n").line() == 5);
    CHECK(load_error<ScenarioError>("[space]\ndims = 1\n[bogus x]\n").line() == 3);
    CHECK(load_error<ScenarioError>("[space]\ndims = 1\n[run]\nform = f\n").line() == 3);
    CHECK_THROWS_AS(load_scenario(data / "bad_dims.scn"), ScenarioError);
    CHECK_THROWS_AS(load_scenario(data / "does_not_exist.scn"), ScenarioError);
}

TEST_CASE("partition sections") {
    const Scenario s = parse_scenario(R"(
[space]
dims = 1
[partition p]
chart a = x1 0 0.7
chart b = x1 0.3 1
)",
                                      "p");
    REQUIRE(s.partitions.size() == 1);
    CHECK(s.partitions.at("p").entries().size() == 2);
    CHECK(check_sampled(s, 7).empty());

    const auto gap = load_error<ScenarioError>("[space]\ndims = 1\n[partition p]\nchart a = x1 0 0.4\nchart b = x1 0.6 1\n");
    CHECK(std::string(gap.what()).find("gap") != std::string::npos);
    CHECK_THROWS_AS(parse_scenario("[space]\ndims = 1\n[partition p]\nchart a = x1 0 1\nsupport z = x1 0 1\n", "t"),
                    ReferenceError);
}

TEST_CASE("a failing run does not stop later runs") {
    const Scenario s = load_scenario(data / "bad_degree.scn");
    CHECK(s.name == "bad_degree");
    Scenario twice = s;
    twice.runs.push_back(s.runs[0]);
    twice.runs[1].theorem = Theorem::Integral;
    twice.runs[1].expect = 1.0;
    const auto results = run(twice);
    REQUIRE(results.size() == 2);
    CHECK(results[0].error.has_value());
    CHECK_FALSE(results[0].ok());
    CHECK(results[1].ok());
}

TEST_CASE("overrides") {
    const Scenario s = parse_scenario(minimal, "m");
    const auto low = run(s, {1, 1e-3});
    CHECK(low[0].report.order == 1);
    CHECK(low[0].report.tol.abs == 1e-3);
    CHECK_FALSE(low[0].report.pass);
}

TEST_CASE("reports") {
    CHECK(emit_report({}, ReportFormat::Json) == "[]\n");

    const auto results = run(parse_scenario(minimal, "m"));
    const auto j = nlohmann::json::parse(emit_report(results, ReportFormat::Json));
    REQUIRE(j.size() == 1);
    CHECK(j[0]["pass"] == true);
    CHECK(j[0]["theorem"] == "stokes");
    CHECK(j[0]["scenario"] == "m");
    const std::vector<std::string> keys{"scenario", "run_index", "theorem", "lhs", "rhs", "abs_err", "rel_err", "order", "pass"};
    std::vector<std::string> got;
    const auto ordered = nlohmann::ordered_json::parse(emit_report(results, ReportFormat::Json));
    for (const auto& [k, v] : ordered[0].items()) got.push_back(k);
    CHECK(got == keys);

    auto mixed = run(load_scenario(data / "bad_degree.scn"));
    mixed.insert(mixed.begin(), results.begin(), results.end());
    const std::string table = emit_report(mixed, ReportFormat::Table);
    CHECK(table.find("PASS") != std::string::npos);
    CHECK(table.find("ERROR") != std::string::npos);
    const auto jm = nlohmann::json::parse(emit_report(mixed, ReportFormat::Json));
    CHECK(jm[1]["pass"] == false);
    CHECK(jm[1]["lhs"].is_null());
    CHECK(jm[1].contains("error"));
}

TEST_CASE("shipped scenarios load, pass and report deterministically") {
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(scenarios)) {
        if (entry.path().extension() != ".scn") continue;
        ++files;
        const Scenario s = load_scenario(entry.path());
        CHECK(check_sampled(s, 1).empty());
        const auto a = run(s);
        for (const auto& r : a) CHECK_MESSAGE(r.ok(), s.name, "#", r.run_index);
        CHECK(emit_report(a, ReportFormat::Json) == emit_report(run(s), ReportFormat::Json));
    }
    CHECK(files >= 7);
}

TEST_CASE("integral runs through a map") {
    const std::string text = R"(
[space]
dims = 2
[map t]
x1 = x1 + x2
x2 = x1 - x2
[form w]
degree = 2
dx1^dx2 : 1
[domain d]
default = 0 1
[run]
theorem = integral
form = w
map = t
domain = d
expect = -2
)";
    const auto results = run(parse_scenario(text, "m"));
    REQUIRE(results.size() == 1);
    CHECK(results[0].ok());
    CHECK(std::abs(results[0].report.lhs + 2.0) <= 1e-14);
    std::string dangling = text;
    dangling.replace(dangling.find("map = t"), 7, "map = q");
    CHECK_THROWS_AS(parse_scenario(dangling, "m"), ReferenceError);
}
