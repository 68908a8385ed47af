#include <cmath>
#include <vector>

#include "flapguard/detector.hpp"
#include "flapguard/devices.hpp"
#include "flapguard/errors.hpp"
#include "flapguard/scenarios.hpp"
#include "scenario_common.hpp"

namespace flapguard {

namespace {

// Device-id offset for the per-unit measurement-noise substreams, so that
// switching draws and noise draws never interleave.
constexpr int kNoiseStreamOffset = 1000;

/// Single-bus aggregate frequency surrogate with a population of stochastic
/// flexible loads. A load trip at step_time leaves a generation surplus; the
/// governor restores the frequency into the DFR activation band, where the
/// sampled stochastic switching of the population sustains a ~1 s relay
/// cycle until mitigation scales the switching probability down.
class DfrFrequencyModel final : public ScenarioModel {
 public:
  DfrFrequencyModel(const ParamReader& params)
      : inertia_(params.get_double("plant.inertia")),
        damping_(params.get_double("plant.damping")),
        droop_(params.get_double("plant.droop")),
        t_gov_(params.get_double("plant.t_gov")),
        load_step_(params.get_double("plant.load_step")),
        step_time_(params.get_double("plant.step_time")),
        noise_sigma_(params.get_double("dfr.noise_sigma")),
        central_cap_(params.get_bool("dfr.central_cap")),
        mitigation_(params.get_bool("mitigation")),
        detectors_enabled_(params.get_bool("detector.enabled")),
        dt_sim_(params.get_double("dt_sim")),
        detector_config_(detail::read_detector(params, "detector")) {
    const int n = params.get_int("dfr.count");
    if (n < 1) throw ConfigInvalid("dfr.count must be >= 1");
    for (int i = 1; i <= n; ++i) {
      DfrUnit unit;
      unit.id = i;
      unit.p_step = params.get_double("dfr.p_step");
      unit.beta = unit.beta_init = params.get_double("dfr.beta_init");
      unit.mitigation_scale = params.get_double("dfr.mitigation_scale");
      unit.omega_threshold = params.get_double("dfr.omega_threshold");
      unit.ctrl_interval = params.get_double("dfr.ctrl_interval");
      unit.hold_time = params.get_double("dfr.hold_time");
      units_.push_back(unit);
      detectors_.emplace_back(detector_config_);
    }
  }

  Eigen::VectorXd initial_state() const override { return Eigen::VectorXd::Zero(2); }

  Eigen::VectorXd derivatives(double t, const Eigen::VectorXd& x) const override {
    const double dw = x[0];
    const double p_gov = x[1];
    const double surplus = t >= step_time_ ? load_step_ : 0.0;
    const double p_dfr = dfr_aggregate_power(units_);
    Eigen::VectorXd dx(2);
    dx[0] = (-damping_ * dw + p_gov + surplus - p_dfr) / inertia_;
    dx[1] = (-dw / droop_ - p_gov) / t_gov_;
    return dx;
  }

  void discrete_update(long step, double t, Eigen::VectorXd& x, RngStreams& rng,
                       EventLog& log) override {
    const double dw = x[0];
    const bool ctrl = detail::on_boundary(step, units_.front().ctrl_interval, dt_sim_);
    const bool det = detectors_enabled_ &&
                     detail::on_boundary(step, detector_config_.dt, dt_sim_);
    if (!ctrl && !det) return;

    const double cap = central_cap_ ? 0.5 * static_cast<double>(units_.size()) : 1e18;
    int n_on = 0;
    for (std::size_t i = 0; i < units_.size(); ++i) {
      DfrUnit& unit = units_[i];
      double measured = dw;
      if (noise_sigma_ > 0.0) {
        measured += noise_sigma_ * rng.gaussian(unit.id + kNoiseStreamOffset);
      }
      if (ctrl) {
        const double u = dfr_activation_signal(measured, unit.omega_threshold);
        const double draw = rng.uniform(unit.id);
        int kappa = dfr_switch(unit, u, draw);
        if (kappa == 1 && static_cast<double>(n_on) + 1.0 > cap) kappa = 0;
        if (kappa != unit.kappa) {
          unit.kappa = kappa;
          log.append({t, unit.id, EventKind::DfrSwitch, static_cast<double>(kappa)});
        }
        n_on += unit.kappa;
        if (dfr_maybe_release(unit, t)) {
          log.append({t, unit.id, EventKind::Mitigate, unit.beta});
        }
      }
      if (det) {
        const DetectionOutput out = detectors_[i].step(measured);
        if (out.evaluated) {
          log.append({t, unit.id, EventKind::Eval, out.r_star,
                      static_cast<double>(out.k_star), static_cast<double>(out.counter)});
        }
        if (out.flag_rising_edge) {
          log.append({t, unit.id, EventKind::FlagUp});
          if (mitigation_) {
            dfr_mitigate(unit);
            log.append({t, unit.id, EventKind::Mitigate, unit.beta});
          }
        }
        if (out.flag_falling_edge) {
          log.append({t, unit.id, EventKind::FlagDown});
          dfr_schedule_release(unit, t);
        }
      }
    }
  }

  std::vector<std::string> observable_names() const override {
    return {"delta_omega", "p_dfr", "p_gen", "n_on", "flags_on"};
  }

  void observe_row(double t, const Eigen::VectorXd& x, std::vector<double>& row) const override {
    (void)t;
    int n_on = 0;
    for (const DfrUnit& u : units_) n_on += u.kappa;
    int flags = 0;
    for (const Detector& d : detectors_) flags += d.flag();
    row[0] = x[0];
    row[1] = dfr_aggregate_power(units_);
    row[2] = x[1];
    row[3] = n_on;
    row[4] = flags;
  }

  std::vector<double> required_intervals() const override {
    return {units_.front().ctrl_interval, detector_config_.dt};
  }

 private:
  double inertia_, damping_, droop_, t_gov_;
  double load_step_, step_time_;
  double noise_sigma_;
  bool central_cap_;
  bool mitigation_;
  bool detectors_enabled_;
  double dt_sim_;
  DetectorConfig detector_config_;
  std::vector<DfrUnit> units_;
  std::vector<Detector> detectors_;
};

}  // namespace

std::unique_ptr<ScenarioModel> build_dfr_frequency(const ParamReader& params) {
  return std::make_unique<DfrFrequencyModel>(params);
}

}  // namespace flapguard
