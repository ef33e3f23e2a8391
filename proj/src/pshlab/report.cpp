#include "pshlab/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pshlab/errors.hpp"

namespace pshlab {

bool Report::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

void Report::add_check(Check c) { checks.push_back(std::move(c)); }

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "pshlab";
    j["analysis"] = analysis;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["results"] = results;
    nlohmann::ordered_json checks_json = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["lhs"] = c.lhs;
        cj["rhs"] = c.rhs;
        cj["slack"] = c.slack;
        cj["tolerance_provenance"] = c.tolerance_provenance;
        if (!c.note.empty()) cj["note"] = c.note;
        checks_json.push_back(cj);
    }
    j["checks"] = checks_json;
    j["all_checks_passed"] = passed();
    j["budget_accounting"] = {{"total_samples", total_samples}};
    nlohmann::ordered_json arts = nlohmann::ordered_json::array();
    for (const auto& a : artifacts) arts.push_back({{"kind", a.kind}, {"path", a.path}});
    j["artifacts"] = arts;
    return j.dump(2) + "\n";
}

Report Report::from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("report json: ") + e.what());
    }
    Report r;
    r.analysis = j.value("analysis", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.config_echo = j.value("config", "");
    if (j.contains("results")) r.results = j["results"];
    if (j.contains("checks")) {
        for (const auto& cj : j["checks"]) {
            Check c;
            c.name = cj.value("name", "");
            c.passed = cj.value("passed", false);
            c.lhs = cj.value("lhs", 0.0);
            c.rhs = cj.value("rhs", 0.0);
            c.slack = cj.value("slack", 0.0);
            c.tolerance_provenance = cj.value("tolerance_provenance", "");
            c.note = cj.value("note", "");
            r.checks.push_back(c);
        }
    }
    if (j.contains("budget_accounting"))
        r.total_samples = j["budget_accounting"].value("total_samples", std::uint64_t{0});
    if (j.contains("artifacts")) {
        for (const auto& aj : j["artifacts"])
            r.artifacts.push_back({aj.value("kind", ""), aj.value("path", "")});
    }
    return r;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << content;
    if (!os) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace pshlab
