#pragma once

#include "pitchstab/fuzzy.hpp"
#include "pitchstab/harness.hpp"
#include "pitchstab/statespace.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace pitchstab::config {

using Json = nlohmann::json;

// All readers reject unknown keys and report problems as ValidationError with a
// field path, e.g. "angle_mfs[2]: b1 > u1" or "plant.mode: expected linear or nonlinear".

// {"a": [[...]], "b": [[...]], "c": [[...]], "sample_rate_hz": f, "units": {...}}
// The optional "units" object is informational and not kept.
StateSpaceModel model_from_json(const Json& j);
Json model_to_json(const StateSpaceModel& m);

// {"angle_mfs": [[b1,u1,u2,b2],...], "velocity_mfs", "angle_gain_mfs", "velocity_gain_mfs",
//  "angle_gain_rules": [[...]], "velocity_gain_rules": [[...]]}, 1-based rule indices.
fuzzy::FuzzyConfig fuzzy_from_json(const Json& j);
Json fuzzy_to_json(const fuzzy::FuzzyConfig& c);

// "model" and "fuzzy" may be inline objects or paths relative to the working directory.
ScenarioConfig scenario_from_json(const Json& j);
Json scenario_to_json(const ScenarioConfig& s);

Json read_json_file(const std::string& path);

StateSpaceModel load_model(const std::string& path);
fuzzy::FuzzyConfig load_fuzzy(const std::string& path);
ScenarioConfig load_scenario(const std::string& path);

enum class Kind { Model, Fuzzy, Scenario };
using AnyConfig = std::variant<StateSpaceModel, fuzzy::FuzzyConfig, ScenarioConfig>;

AnyConfig load_and_validate_config(const std::string& path, Kind kind);

}  // namespace pitchstab::config
