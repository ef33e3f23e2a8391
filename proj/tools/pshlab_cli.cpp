// pshlab command-line front end. Talks to the core exclusively through the
// C API in pshlab/pshlab.h.
//
//   pshlab run <config> [--out DIR] [--threads N]
//   pshlab reproduce <case-id> [--out DIR] [--threads N]
//   pshlab catalog
//   pshlab plot <report.json> <artifact> <out.svg>
//
// Exit codes: 0 all checks passed, 1 check failures, 2 parse/usage errors.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pshlab/pshlab.h"

namespace {

int fail_with(pshlab_status st) {
    std::cerr << "pshlab: " << pshlab_last_error() << "\n";
    // Parse and usage problems are exit 2; estimation aborts too (the run did
    // not produce a verdict). Check failures use exit 1 elsewhere.
    (void)st;
    return 2;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("PSHLAB_OUT")) return env;
    return "pshlab_out";
}

int handle_report(pshlab_report* rep, const std::string& out_dir) {
    char* json = nullptr;
    if (pshlab_report_json(rep, &json) == PSHLAB_OK) {
        std::cout << json;
        pshlab_string_free(json);
    }
    int passed = pshlab_report_passed(rep);
    pshlab_report_free(rep);
    if (!out_dir.empty()) std::cerr << "pshlab: artifacts written to " << out_dir << "\n";
    return passed == 1 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pshlab — singularity and oscillation laboratory for psh functions"};
    app.require_subcommand(1);

    std::string config_path, case_id, report_path, artifact, out_svg;
    std::string out_dir;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (default $PSHLAB_OUT or ./pshlab_out)");
    run->add_option("--threads", threads, "worker threads (results are identical for any value)");

    CLI::App* repro = app.add_subcommand("reproduce", "run a pinned reproduction case");
    repro->add_option("case", case_id,
                      "one of: example-5-1, example-5-2, skoda-extremes, sobolev-sharpness, "
                      "decomposition-battery")
        ->required();
    repro->add_option("--out", out_dir, "output directory");
    repro->add_option("--threads", threads, "worker threads");

    app.add_subcommand("catalog", "list the built-in test functions");

    CLI::App* plot = app.add_subcommand("plot", "re-render an SVG from a report");
    plot->add_option("report", report_path, "report.json path")->required();
    plot->add_option("artifact", artifact, "plot name (slope, vmo, jn)")->required();
    plot->add_option("svg", out_svg, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0) pshlab_set_threads(threads);

    if (run->parsed()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "pshlab: cannot open " << config_path << "\n";
            return 2;
        }
        std::ostringstream ss;
        ss << is.rdbuf();
        if (out_dir.empty()) out_dir = default_out_dir();
        pshlab_report* rep = nullptr;
        pshlab_status st = pshlab_run_config(ss.str().c_str(), out_dir.c_str(), &rep);
        if (st != PSHLAB_OK) return fail_with(st);
        return handle_report(rep, out_dir);
    }
    if (repro->parsed()) {
        if (out_dir.empty()) out_dir = default_out_dir();
        pshlab_report* rep = nullptr;
        pshlab_status st = pshlab_reproduce(case_id.c_str(), out_dir.c_str(), &rep);
        if (st != PSHLAB_OK) return fail_with(st);
        return handle_report(rep, out_dir);
    }
    if (app.get_subcommand("catalog")->parsed()) {
        char* text = nullptr;
        pshlab_status st = pshlab_catalog_text(&text);
        if (st != PSHLAB_OK) return fail_with(st);
        std::cout << text;
        pshlab_string_free(text);
        return 0;
    }
    if (plot->parsed()) {
        pshlab_status st = pshlab_plot(report_path.c_str(), artifact.c_str(), out_svg.c_str());
        if (st != PSHLAB_OK) return fail_with(st);
        return 0;
    }
    return 2;
}
