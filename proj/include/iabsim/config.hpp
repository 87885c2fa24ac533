#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iabsim/channel.hpp"
#include "iabsim/model.hpp"
#include "iabsim/scenario.hpp"

#include "json.hpp"

namespace iabsim {

/// Where the deployment comes from: CSV files or a built-in generator.
struct ScenarioSource {
    std::optional<std::string> sites_file;
    std::optional<std::string> ues_file;
    std::optional<ScenarioParams> generator;
};

struct RunSpec {
    SimConfig sim;
    ScenarioSource scenario;
    std::string run_id;  // defaults to "run-s<seed>"
    std::string output_dir = "out";
    nlohmann::ordered_json echo;  // merged config as written to kpi.json
};

/// Parses the JSON config file, applies `key.path=value` overrides, and
/// validates. Unknown keys raise ConfigError naming the key.
RunSpec load_run_spec(const std::string& config_path,
                      const std::vector<std::string>& overrides);

/// Same, from an already-parsed document (used by tests).
RunSpec run_spec_from_json(nlohmann::ordered_json doc,
                           const std::vector<std::string>& overrides,
                           const std::string& base_dir);

/// Materializes the deployment (files or generator) and builds the validated
/// topology: backhaul links first, then UE attachment, then sub-THz band
/// assignment. Returns the topology and the loaded traces (if any).
struct BuiltScenario {
    Topology topology;
    std::optional<ThzTraceTable> traces;
};

BuiltScenario build_scenario(const RunSpec& spec);

}  // namespace iabsim
