#include "flapguard/detector.hpp"

#include <cmath>
#include <string>

#include "flapguard/errors.hpp"

namespace flapguard {

int DetectorConfig::n_window() const {
  return static_cast<int>(std::llround(window_seconds / dt));
}

int DetectorConfig::n_shift() const {
  return static_cast<int>(std::llround(shift_seconds / dt));
}

LagBand DetectorConfig::band() const {
  return lag_bounds(t_min, t_max, dt, static_cast<std::size_t>(n_window()));
}

void DetectorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigInvalid("detector: dt must be > 0");
  if (n_shift() < 1) throw ConfigInvalid("detector: shift must be >= 1 sample");
  if (!(r_threshold > 0.0 && r_threshold < 1.0)) {
    throw ConfigInvalid("detector: r_threshold must be in (0,1)");
  }
  if (!(epsilon >= 0.0)) throw ConfigInvalid("detector: epsilon must be >= 0");
  if (persistence < 1) throw ConfigInvalid("detector: persistence must be >= 1");
  if (!(sigma_floor > 0.0)) throw ConfigInvalid("detector: sigma_floor must be > 0");
  LagBand b;
  try {
    b = band();
  } catch (const Error& e) {
    throw ConfigInvalid(std::string("detector: ") + e.what());
  }
  if (n_window() < 2 * b.k_max) {
    throw ConfigInvalid("detector: window must span at least two candidate periods (N_w >= 2 k_max)");
  }
}

Detector::Detector(DetectorConfig config)
    : config_(config),
      band_((config.validate(), config.band())),
      buffer_(static_cast<std::size_t>(config.n_window()), config.dt) {}

DetectionOutput Detector::step(double sample) {
  if (!std::isfinite(sample)) throw NonFiniteSample("detector: non-finite sample");
  buffer_.push(sample);
  ++samples_since_eval_;

  DetectionOutput out;
  out.counter = counter_;
  out.flag = flag_;
  if (!buffer_.full()) return out;
  if (!first_eval_pending_ && samples_since_eval_ < config_.n_shift()) return out;

  first_eval_pending_ = false;
  samples_since_eval_ = 0;

  const AcfResult eval = window_acf(buffer_, band_, config_.sigma_floor);
  last_eval_ = eval;

  const bool above = eval.r_star > config_.r_threshold;
  const bool not_decayed = !prev_r_star_ || eval.r_star >= *prev_r_star_ - config_.epsilon;
  counter_ = (above && not_decayed) ? counter_ + 1 : 0;
  prev_r_star_ = eval.r_star;

  const bool new_flag = counter_ >= config_.persistence;
  out.evaluated = true;
  out.r_star = eval.r_star;
  out.k_star = eval.k_star;
  out.degenerate = eval.degenerate;
  out.counter = counter_;
  out.flag = new_flag;
  out.flag_rising_edge = new_flag && !flag_;
  out.flag_falling_edge = !new_flag && flag_;
  flag_ = new_flag;
  return out;
}

void Detector::reset() {
  buffer_.clear();
  samples_since_eval_ = 0;
  first_eval_pending_ = true;
  counter_ = 0;
  flag_ = false;
  prev_r_star_.reset();
  last_eval_.reset();
}

}  // namespace flapguard
