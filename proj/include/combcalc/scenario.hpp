#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "combcalc/error.hpp"
#include "combcalc/stokes.hpp"

namespace combcalc {

// Scenario file problem, located by 1-based line and column.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& what, int line, int column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// A run names something that was never declared.
class ReferenceError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

struct RunSpec {
    int line = 0;
    Theorem theorem = Theorem::Stokes;
    std::string form;      // stokes, integral, atlas
    std::string field;     // gauss
    std::string volume;    // gauss; empty means the standard volume form
    std::string domain;    // stokes, gauss, integral
    std::string partition; // atlas
    std::string map;       // integral: integrate the pullback through this map
    std::optional<double> expect; // integral, atlas
    int order = 8;
    int cells = 1;
    Tolerance tol;
};

struct Scenario {
    std::string name;
    CombSpace space;
    std::map<std::string, DiffForm> forms;
    std::map<std::string, VectorField> fields;
    std::map<std::string, SmoothMap> maps;
    std::map<std::string, Box> domains;
    std::map<std::string, PartitionOfUnity> partitions;
    std::vector<RunSpec> runs;
};

// Parses and validates scenario text eagerly. default_name is used when the
// text has no [scenario] name. Throws ScenarioError / ReferenceError.
Scenario parse_scenario(std::string_view text, const std::string& default_name);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOverrides {
    std::optional<int> order;
    std::optional<double> tol;
};

struct RunResult {
    std::string scenario;
    int run_index = 0;
    VerificationReport report;
    std::optional<std::string> error;

    bool ok() const { return !error && report.pass; }
};

// Executes every run in order. A run that throws becomes an error result and
// later runs still execute.
std::vector<RunResult> run(const Scenario& s, const RunOverrides& overrides = {});

// Sampled invariant checks (partition sums and nonnegativity) at
// pseudo-random points drawn with seed. Returns one message per violation.
std::vector<std::string> check_sampled(const Scenario& s, std::uint64_t seed, int samples = 1000);

enum class ReportFormat { Json, Table };

std::string emit_report(const std::vector<RunResult>& results, ReportFormat format);

} // namespace combcalc
