#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/lelong.hpp"
#include "pshlab/report.hpp"

namespace pshlab {

// Flat key = value scenario description ('#' comments, lists space-separated).
// The echoed text in a report reruns to identical numbers.
struct ScenarioConfig {
    std::string echo;  // verbatim source text

    std::string analysis;
    std::string function_text;  // expression grammar, or catalog:<name>
    std::string domain_text;
    std::vector<double> point;
    std::vector<double> ball;  // 2n center coordinates + radius
    RadiusGrid grid;
    std::vector<double> radii;  // vmo / bmo radius grids
    std::uint64_t budget = 0;   // 0 = analysis default
    int center_budget = 0;
    int probes = 0;
    int levels = 0;
    double lambda_max = 0.0;
    int lambda_steps = 0;
    double window_lo = 0.0, window_hi = 0.0, tol = 0.0;
    std::string eta_kind;
    double eta_alpha = 0.25, eta_gamma = 0.0;
    std::vector<double> kappa_t;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    int threads = 0;

    // Optional pinned expectations turned into pass/fail checks.
    std::string expect_field;
    std::optional<double> expect_value;
    std::optional<double> expect_tol;
    std::string expect_outcome;  // finite | divergent
};

ScenarioConfig parse_config(const std::string& text);

// Runs the named analysis, writes report.json plus csv/svg artifacts under
// out_dir (when nonempty), and returns the report. Wall-clock accounting goes
// to <out_dir>/timing.txt, outside the deterministic report bytes.
Report run_scenario(const ScenarioConfig& cfg);

// Pinned paper-artifact batteries: example-5-1, example-5-2, skoda-extremes,
// sobolev-sharpness, decomposition-battery.
Report reproduce(const std::string& case_id, const std::string& out_dir);

std::vector<std::string> reproduce_case_ids();

// Re-renders a plot from a report's embedded tables. artifact is one of the
// keys listed in report.results["tables"].
std::string plot_from_report(const Report& report, const std::string& artifact);

// Exit-code contract: 0 all checks pass, 1 check failures, 2 parse/usage.
int exit_code_for(const Report& report);

// Catalog listing for the CLI (one line per entry; stable order).
std::string catalog_listing();

}  // namespace pshlab
