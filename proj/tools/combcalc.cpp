// Command-line driver: check, run and report on scenario files.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "combcalc/error.hpp"
#include "combcalc/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitLoad = 2;

struct Options {
    std::vector<std::string> files;
    std::optional<int> order;
    std::optional<double> tol;
    std::uint64_t seed = 0x5eed;
    std::string format = "table";
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("files", o.files, "Scenario files")->required()->check(CLI::ExistingFile);
    cmd->add_option("--order", o.order, "Override the Gauss-Legendre order of every run")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "Override both absolute and relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Seed for sampled invariant checks");
}

// Loads every file; prints the problem and returns nullopt on the first failure.
std::optional<std::vector<combcalc::Scenario>> load_all(const Options& o) {
    std::vector<combcalc::Scenario> out;
    for (const std::string& f : o.files) {
        try {
            out.push_back(combcalc::load_scenario(f));
        } catch (const combcalc::Error& err) {
            std::cerr << f << ": " << err.what() << "\n";
            return std::nullopt;
        }
    }
    return out;
}

int execute(const Options& o, bool print_report) {
    const auto scenarios = load_all(o);
    if (!scenarios) return kExitLoad;
    std::vector<combcalc::RunResult> results;
    for (const auto& s : *scenarios) {
        auto r = combcalc::run(s, {o.order, o.tol});
        results.insert(results.end(), r.begin(), r.end());
    }
    bool all_ok = true;
    for (const auto& r : results) all_ok = all_ok && r.ok();
    if (print_report) {
        const auto fmt = o.format == "json" ? combcalc::ReportFormat::Json : combcalc::ReportFormat::Table;
        std::cout << combcalc::emit_report(results, fmt);
    } else {
        std::size_t passed = 0;
        for (const auto& r : results) {
            if (r.ok()) ++passed;
            std::cout << r.scenario << "#" << r.run_index << " " << combcalc::to_string(r.report.theorem) << ": "
                      << (r.error ? "ERROR " + *r.error : r.report.pass ? "PASS" : "FAIL") << "\n";
        }
        std::cout << passed << "/" << results.size() << " runs passed\n";
    }
    return all_ok ? kExitPass : kExitFail;
}

int check(const Options& o) {
    const auto scenarios = load_all(o);
    if (!scenarios) return kExitLoad;
    int problems = 0;
    for (const auto& s : *scenarios) {
        for (const std::string& msg : combcalc::check_sampled(s, o.seed)) {
            std::cerr << s.name << ": " << msg << "\n";
            ++problems;
        }
        std::cout << s.name << ": " << s.runs.size() << " runs, " << (problems ? "invalid" : "ok") << "\n";
    }
    return problems ? kExitLoad : kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exterior calculus on combinatorial Euclidean spaces: Stokes and Gauss verification"};
    app.require_subcommand(1);

    Options check_opts;
    Options run_opts;
    Options report_opts;
    auto* check_cmd = app.add_subcommand("check", "Load and validate scenarios without running them");
    add_common(check_cmd, check_opts);
    auto* run_cmd = app.add_subcommand("run", "Execute scenarios and print a pass/fail summary");
    add_common(run_cmd, run_opts);
    auto* report_cmd = app.add_subcommand("report", "Execute scenarios and print a full report");
    add_common(report_cmd, report_opts);
    report_cmd->add_option("--format", report_opts.format, "Report format")
        ->check(CLI::IsMember({"json", "table"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitLoad;
    }

    if (check_cmd->parsed()) return check(check_opts);
    if (run_cmd->parsed()) return execute(run_opts, false);
    return execute(report_opts, true);
}
