#include <cmath>
#include <vector>

#include "flapguard/detector.hpp"
#include "flapguard/devices.hpp"
#include "flapguard/errors.hpp"
#include "flapguard/scenarios.hpp"
#include "flapguard/teo.hpp"
#include "scenario_common.hpp"

namespace flapguard {

namespace {

/// Bank of coupled second-order regulator loops standing in for AVRs. Each
/// loop has damping zeta(K) = zeta0 (1 - K / K_crit), negative above the
/// critical gain; a cubic term bounds the resulting limit cycle. The voltage
/// observable is v_i = v_ref + e_i and the feedback state e_dot_i feeds the
/// Teager trackers used to rank contributions once flapping is detected.
class AvrLimitCycleModel final : public ScenarioModel {
 public:
  AvrLimitCycleModel(const ParamReader& params)
      : n_(params.get_int("avr.count")),
        gain_min_(params.get_double("avr.gain_min")),
        gain_max_(params.get_double("avr.gain_max")),
        k_crit_(params.get_double("avr.k_crit")),
        k_safe_(params.get_double("avr.k_safe")),
        zeta0_(params.get_double("avr.zeta0")),
        omega0_(params.get_double("avr.omega0")),
        coupling_(params.get_double("avr.coupling")),
        sat_gamma_(params.get_double("avr.sat_gamma")),
        v_ref_(params.get_double("avr.v_ref")),
        ctrl_interval_(params.get_double("avr.ctrl_interval")),
        latch_(params.get_bool("avr.latch")),
        kick_time_(params.get_double("disturbance.time")),
        kick_size_(params.get_double("disturbance.kick")),
        mitigation_(params.get_bool("mitigation")),
        detectors_enabled_(params.get_bool("detector.enabled")),
        dt_sim_(params.get_double("dt_sim")),
        detector_config_(detail::read_detector(params, "detector")) {
    if (n_ < 1) throw ConfigInvalid("avr.count must be >= 1");
    if (!(gain_min_ <= gain_max_)) throw ConfigInvalid("avr.gain_min must be <= avr.gain_max");
    if (!(k_safe_ > 0.0)) throw ConfigInvalid("avr.k_safe must be > 0");
    const double alpha_max = params.get_double("teo.alpha_max");
    const double teo_scale = params.get_double("teo.scale");
    for (int i = 1; i <= n_; ++i) {
      AvrGainSwitcher sw;
      sw.id = i;
      sw.ctrl_interval = ctrl_interval_;
      sw.latch = latch_;
      switchers_.push_back(sw);
      trackers_.emplace_back(alpha_max, teo_scale);
      detectors_.emplace_back(detector_config_);
    }
  }

  void initialize(RngStreams& rng, EventLog& log) override {
    (void)log;
    for (AvrGainSwitcher& sw : switchers_) {
      const double k = gain_min_ + rng.uniform(sw.id) * (gain_max_ - gain_min_);
      sw.k_init = sw.k_current = k;
      sw.k_safe = k_safe_;
      if (!(sw.k_safe < sw.k_init)) throw ConfigInvalid("avr.k_safe must be below drawn gains");
    }
  }

  Eigen::VectorXd initial_state() const override {
    return Eigen::VectorXd::Zero(2 * n_);
  }

  // State layout: x = [e_1..e_n, ed_1..ed_n].
  Eigen::VectorXd derivatives(double t, const Eigen::VectorXd& x) const override {
    (void)t;
    const auto e = x.head(n_);
    const auto ed = x.tail(n_);
    const double e_sum = e.sum();
    Eigen::VectorXd dx(2 * n_);
    dx.head(n_) = ed;
    for (int i = 0; i < n_; ++i) {
      const double zeta = zeta0_ * (1.0 - switchers_[i].k_current / k_crit_);
      const double couple = coupling_ * (e_sum - n_ * e[i]);
      dx[n_ + i] = -2.0 * zeta * omega0_ * ed[i] - omega0_ * omega0_ * e[i] -
                   sat_gamma_ * ed[i] * ed[i] * ed[i] + couple;
    }
    return dx;
  }

  void discrete_update(long step, double t, Eigen::VectorXd& x, RngStreams& rng,
                       EventLog& log) override {
    if (!kicked_ && t >= kick_time_) {
      x.tail(n_).array() += kick_size_;
      kicked_ = true;
    }

    // Feature signal for the trackers is the feedback state at sim rate.
    for (int i = 0; i < n_; ++i) trackers_[i].push(x[n_ + i]);

    const bool det = detectors_enabled_ && detail::on_boundary(step, detector_config_.dt, dt_sim_);
    const bool ctrl = detail::on_boundary(step, ctrl_interval_, dt_sim_);
    if (!det && !ctrl) return;

    bool arm_now = false;
    for (int i = 0; i < n_; ++i) {
      AvrGainSwitcher& sw = switchers_[i];
      if (det) {
        const DetectionOutput out = detectors_[i].step(v_ref_ + x[i]);
        if (out.evaluated) {
          log.append({t, sw.id, EventKind::Eval, out.r_star,
                      static_cast<double>(out.k_star), static_cast<double>(out.counter)});
        }
        if (out.flag_rising_edge) {
          log.append({t, sw.id, EventKind::FlagUp});
          if (!armed_) arm_now = true;
        }
        if (out.flag_falling_edge) log.append({t, sw.id, EventKind::FlagDown});
      }
      if (ctrl && armed_ && mitigation_ && any_flag() && t > arm_time_) {
        const double alpha = trackers_[i].impact_angle(t);
        log.append({t, sw.id, EventKind::TeoSnapshot, trackers_[i].cumulative(), alpha});
        const double old_k = sw.k_current;
        const double draw = rng.uniform(sw.id);
        avr_gain_decision(sw, alpha, draw);
        if (sw.k_current != old_k) {
          log.append({t, sw.id, EventKind::GainSwitch, sw.k_current});
        }
      }
    }
    if (arm_now) {
      armed_ = true;
      arm_time_ = t;
      for (TeoTracker& tr : trackers_) tr.arm(t);
    }
  }

  std::vector<std::string> observable_names() const override {
    std::vector<std::string> names;
    for (int i = 1; i <= n_; ++i) names.push_back("v" + std::to_string(i));
    for (int i = 1; i <= n_; ++i) names.push_back("ed" + std::to_string(i));
    for (int i = 1; i <= n_; ++i) names.push_back("k" + std::to_string(i));
    names.push_back("any_flag");
    return names;
  }

  void observe_row(double t, const Eigen::VectorXd& x, std::vector<double>& row) const override {
    (void)t;
    for (int i = 0; i < n_; ++i) row[i] = v_ref_ + x[i];
    for (int i = 0; i < n_; ++i) row[n_ + i] = x[n_ + i];
    for (int i = 0; i < n_; ++i) row[2 * n_ + i] = switchers_[i].k_current;
    row[3 * n_] = any_flag() ? 1.0 : 0.0;
  }

  std::vector<double> required_intervals() const override {
    return {detector_config_.dt, ctrl_interval_};
  }

 private:
  bool any_flag() const {
    for (const Detector& d : detectors_) {
      if (d.flag()) return true;
    }
    return false;
  }

  int n_;
  double gain_min_, gain_max_, k_crit_, k_safe_, zeta0_, omega0_, coupling_, sat_gamma_;
  double v_ref_, ctrl_interval_;
  bool latch_;
  double kick_time_, kick_size_;
  bool mitigation_;
  bool detectors_enabled_;
  double dt_sim_;
  DetectorConfig detector_config_;
  std::vector<AvrGainSwitcher> switchers_;
  std::vector<TeoTracker> trackers_;
  std::vector<Detector> detectors_;
  bool kicked_ = false;
  bool armed_ = false;
  double arm_time_ = 0.0;
};

}  // namespace

std::unique_ptr<ScenarioModel> build_avr_limit_cycle(const ParamReader& params) {
  return std::make_unique<AvrLimitCycleModel>(params);
}

}  // namespace flapguard
