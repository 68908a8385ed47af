#pragma once

#include <cmath>
#include <cstdio>

#include "flapguard/config.hpp"
#include "flapguard/detector.hpp"

namespace flapguard::detail {

/// Read a DetectorConfig from "<prefix>.dt", "<prefix>.window_seconds", ...
inline DetectorConfig read_detector(const ParamReader& params, const std::string& prefix) {
  DetectorConfig cfg;
  cfg.dt = params.get_double(prefix + ".dt");
  cfg.window_seconds = params.get_double(prefix + ".window_seconds");
  cfg.shift_seconds = params.get_double(prefix + ".shift_seconds");
  cfg.t_min = params.get_double(prefix + ".t_min");
  cfg.t_max = params.get_double(prefix + ".t_max");
  cfg.r_threshold = params.get_double(prefix + ".r_threshold");
  cfg.epsilon = params.get_double(prefix + ".epsilon");
  cfg.persistence = params.get_int(prefix + ".persistence");
  cfg.sigma_floor = params.get_double(prefix + ".sigma_floor");
  cfg.validate();
  return cfg;
}

inline void add_detector_defaults(ParamMap& map, const std::string& prefix, double dt,
                                  double window_s, double shift_s, double t_min, double t_max,
                                  double r_th, double eps, int persistence) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  map[prefix + ".dt"] = num(dt);
  map[prefix + ".window_seconds"] = num(window_s);
  map[prefix + ".shift_seconds"] = num(shift_s);
  map[prefix + ".t_min"] = num(t_min);
  map[prefix + ".t_max"] = num(t_max);
  map[prefix + ".r_threshold"] = num(r_th);
  map[prefix + ".epsilon"] = num(eps);
  map[prefix + ".persistence"] = std::to_string(persistence);
  map[prefix + ".sigma_floor"] = "1e-9";
}

/// True every `interval` seconds given the step index and dt_sim.
inline bool on_boundary(long step, double interval, double dt_sim) {
  const long period = static_cast<long>(std::llround(interval / dt_sim));
  return period > 0 && step % period == 0;
}

}  // namespace flapguard::detail
