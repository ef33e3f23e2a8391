#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pshlab {

struct Check {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    std::string tolerance_provenance;  // where the threshold comes from
    std::string note;
};

struct ArtifactRef {
    std::string kind;  // "csv" | "svg"
    std::string path;
};

// Self-contained record of one scenario run: the echoed config reruns to the
// same numbers. Serialization is deterministic; wall-clock accounting lives in
// a sidecar file so reports stay byte-identical across thread counts.
struct Report {
    std::string analysis;
    std::string config_echo;
    std::uint64_t seed = 0;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::vector<Check> checks;
    std::uint64_t total_samples = 0;
    std::vector<ArtifactRef> artifacts;

    bool passed() const;
    void add_check(Check c);
    std::string to_json() const;  // deterministic bytes
    static Report from_json(const std::string& text);
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pshlab
