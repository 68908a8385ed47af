#include "flapguard/scenarios.hpp"

#include "flapguard/errors.hpp"
#include "scenario_common.hpp"

namespace flapguard {

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "dfr_frequency") return ScenarioKind::DfrFrequency;
  if (name == "ultc_cascade") return ScenarioKind::UltcCascade;
  if (name == "avr_limit_cycle") return ScenarioKind::AvrLimitCycle;
  throw ConfigInvalid("unknown scenario: " + name);
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::DfrFrequency: return "dfr_frequency";
    case ScenarioKind::UltcCascade: return "ultc_cascade";
    case ScenarioKind::AvrLimitCycle: return "avr_limit_cycle";
  }
  throw ConfigInvalid("unknown scenario kind");
}

ParamMap default_params(ScenarioKind kind) {
  ParamMap map;
  map["scenario"] = to_string(kind);
  map["seed"] = "1";
  map["mitigation"] = "on";
  map["detector.enabled"] = "on";

  switch (kind) {
    case ScenarioKind::DfrFrequency:
      map["dt_sim"] = "0.01";
      map["t_end"] = "200";
      map["plant.inertia"] = "1.5";
      map["plant.damping"] = "1.0";
      map["plant.droop"] = "0.005";
      map["plant.t_gov"] = "1.5";
      map["plant.load_step"] = "1.1";
      map["plant.step_time"] = "5";
      map["dfr.count"] = "20";
      map["dfr.p_step"] = "0.01";
      map["dfr.beta_init"] = "1.0";
      map["dfr.mitigation_scale"] = "0.3";
      map["dfr.omega_threshold"] = "0.01";
      map["dfr.ctrl_interval"] = "0.25";
      map["dfr.hold_time"] = "120";
      map["dfr.noise_sigma"] = "0";
      map["dfr.central_cap"] = "off";
      detail::add_detector_defaults(map, "detector", 0.1, 12, 3, 0.9, 1.1, 0.90, 1e-3, 4);
      break;

    case ScenarioKind::UltcCascade:
      map["dt_sim"] = "0.1";
      map["t_end"] = "1500";
      map["feeder.v_source"] = "1.0";
      map["feeder.x_source"] = "0.1";
      map["feeder.shunt_b"] = "3.33";
      map["ultc1.m0"] = "1.013";
      map["ultc1.step"] = "0.02";
      map["ultc1.delay"] = "53";
      map["ultc1.v_min"] = "0.99";
      map["ultc1.v_max"] = "1.01";
      map["ultc1.m_min"] = "0.85";
      map["ultc1.m_max"] = "1.35";
      map["ultc1.persistence"] = "4";
      map["ultc2.m0"] = "1.031";
      map["ultc2.step"] = "0.05";
      map["ultc2.delay"] = "19";
      map["ultc2.v_min"] = "0.99";
      map["ultc2.v_max"] = "1.01";
      map["ultc2.m_min"] = "0.85";
      map["ultc2.m_max"] = "1.45";
      map["ultc2.persistence"] = "8";
      map["load.t_p"] = "10";
      map["load.t_q"] = "5";
      map["load.p0"] = "2";
      map["load.q0"] = "0.5";
      map["load.sign_convention"] = "paper";
      detail::add_detector_defaults(map, "detector", 1, 300, 30, 80, 120, 0.35, 1e-3, 4);
      break;

    case ScenarioKind::AvrLimitCycle:
      map["dt_sim"] = "0.01";
      map["t_end"] = "120";
      map["avr.count"] = "5";
      map["avr.gain_min"] = "240";
      map["avr.gain_max"] = "300";
      map["avr.k_crit"] = "260";
      map["avr.k_safe"] = "150";
      map["avr.zeta0"] = "0.3";
      map["avr.omega0"] = "6.2831853";
      map["avr.coupling"] = "0.5";
      map["avr.sat_gamma"] = "8.0";
      map["avr.v_ref"] = "1.0";
      map["avr.ctrl_interval"] = "5";
      map["avr.latch"] = "on";
      map["disturbance.time"] = "1";
      map["disturbance.kick"] = "0.02";
      map["teo.alpha_max"] = "90";
      map["teo.scale"] = "50";
      detail::add_detector_defaults(map, "detector", 0.1, 12, 3, 0.9, 1.1, 0.90, 1e-3, 4);
      break;
  }
  return map;
}

ScenarioBuild build_scenario(const ParamMap& user_params) {
  auto it = user_params.find("scenario");
  if (it == user_params.end()) throw ConfigInvalid("config must set 'scenario'");
  const ScenarioKind kind = scenario_kind_from_string(it->second);

  ParamMap defaults = default_params(kind);
  // Optional per-scenario keys that have no fixed default.
  std::set<std::string> passthrough = {"load.x_p0", "load.x_q0"};
  ParamReader reader(defaults, user_params, passthrough);

  ScenarioBuild build;
  build.sim.dt_sim = reader.get_double("dt_sim");
  build.sim.t_end = reader.get_double("t_end");
  build.sim.seed = reader.get_uint64("seed");
  build.resolved = reader.resolved();

  switch (kind) {
    case ScenarioKind::DfrFrequency:
      build.model = build_dfr_frequency(reader);
      break;
    case ScenarioKind::UltcCascade:
      build.model = build_ultc_cascade(reader);
      break;
    case ScenarioKind::AvrLimitCycle:
      build.model = build_avr_limit_cycle(reader);
      break;
  }
  return build;
}

}  // namespace flapguard
