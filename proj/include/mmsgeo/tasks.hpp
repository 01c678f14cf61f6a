#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmsgeo/config.hpp"
#include "mmsgeo/report.hpp"

namespace mmsgeo::app {

// Runs cfg.task and returns its report. Throws Error on config or runtime problems.
Report run_task(const Config& cfg);

// Exact invariants (quick) plus numeric sandwich, coarea and ordering checks (full).
Report run_verify(const SampledSpace& space, const std::string& level, std::uint64_t seed = 1);

struct SuiteInfo {
    std::string name;
    std::string description;
};

const std::vector<SuiteInfo>& suites();
// "all" and "disk" expand to several suites; each suite's report is merged with a "<suite>." prefix.
std::vector<std::string> expand_suites(const std::vector<std::string>& names);
Report run_suite(const std::string& name, std::uint64_t seed = 1);

// Spaces exercised by the invariants suite, by name.
std::vector<std::string> invariant_spaces();
SampledSpace build_invariant_space(const std::string& name);

// Writes verdicts.csv, one CSV per table and summary.json; returns file names.
std::vector<std::string> write_artifacts(const std::filesystem::path& dir, const Report& report, nlohmann::json record);

nlohmann::json run_record(const std::string& task, const std::string& config_source, const std::string& config_text,
                          std::uint64_t seed, unsigned workers, double wall_seconds);

}  // namespace mmsgeo::app
