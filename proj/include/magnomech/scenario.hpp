#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "magnomech/config.hpp"
#include "magnomech/dynamics.hpp"

namespace magnomech {

struct ScenarioResult {
    nlohmann::json summary;
    std::vector<std::string> files;  // paths written, relative to output dir
};

/// Builds the space, initial state and schedule called for by the
/// configuration.  Exposed so tests and the sensitivity command can reuse
/// the exact scenario setup.
struct ScenarioSetup {
    HilbertSpace space;
    StateVector initial;
    TargetSpec target;
    PulseSchedule schedule;
    HamiltonianSpec spec;
};

ScenarioSetup prepare_setup(const ScenarioConfig& config);

/// Executes the configured scenario and writes all artifacts (CSV curves,
/// summary.json, config.dump) into config.output_dir.
ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace magnomech
