#pragma once

#include <map>
#include <memory>
#include <string>

#include "flapguard/config.hpp"
#include "flapguard/sim_engine.hpp"

namespace flapguard {

enum class ScenarioKind { DfrFrequency, UltcCascade, AvrLimitCycle };

ScenarioKind scenario_kind_from_string(const std::string& name);
std::string to_string(ScenarioKind kind);

/// Built-in defaults for a scenario, including the engine keys
/// (scenario, seed, t_end, dt_sim, mitigation, detector.enabled).
ParamMap default_params(ScenarioKind kind);

struct ScenarioBuild {
  std::unique_ptr<ScenarioModel> model;
  SimConfig sim;
  ParamMap resolved;  // effective config after defaults + overrides
};

/// Build a scenario from a parameter map. The map must contain "scenario";
/// unknown keys raise ConfigInvalid.
ScenarioBuild build_scenario(const ParamMap& user_params);

std::unique_ptr<ScenarioModel> build_dfr_frequency(const ParamReader& params);
std::unique_ptr<ScenarioModel> build_ultc_cascade(const ParamReader& params);
std::unique_ptr<ScenarioModel> build_avr_limit_cycle(const ParamReader& params);

}  // namespace flapguard
