#include "flapguard/teo.hpp"

#include <algorithm>
#include <cmath>

#include "flapguard/errors.hpp"

namespace flapguard {

double teo_sample(double x_prev, double x_curr, double x_next) {
  return x_curr * x_curr - x_next * x_prev;
}

TeoTracker::TeoTracker(double alpha_max_deg, double scale)
    : alpha_max_deg_(alpha_max_deg), scale_(scale) {
  if (!(alpha_max_deg > 0.0)) throw ConfigInvalid("TeoTracker: alpha_max must be > 0");
}

void TeoTracker::arm(double t_start) {
  armed_ = true;
  t_start_ = t_start;
  n_seen_ = 0;
  cumulative_ = 0.0;
}

void TeoTracker::disarm() { armed_ = false; }

double TeoTracker::t_start() const {
  if (!armed_) throw NotArmed("TeoTracker: not armed");
  return t_start_;
}

void TeoTracker::push(double sample) {
  if (!armed_) return;
  if (n_seen_ >= 2) {
    // x2_, x1_, sample form the (n-1, n, n+1) triple centered on x1_.
    cumulative_ += teo_sample(x2_, x1_, sample);
  }
  x2_ = x1_;
  x1_ = sample;
  ++n_seen_;
}

double TeoTracker::impact_angle(double t_now) const {
  if (!armed_) throw NotArmed("TeoTracker: not armed");
  if (!(t_now > t_start_)) throw NotArmed("TeoTracker: t_now must be > t_start");
  const double slope = scale_ * cumulative_ / (t_now - t_start_);
  const double alpha_deg = std::atan(slope) * 180.0 / M_PI;
  return std::clamp(alpha_deg / alpha_max_deg_, 0.0, 1.0);
}

}  // namespace flapguard
