#pragma once

namespace flapguard {

/// Discrete Teager energy: x[n]^2 - x[n+1] * x[n-1].
double teo_sample(double x_prev, double x_curr, double x_next);

/// Running cumulative Teager energy of a feature signal, plus the normalized
/// impact angle used to rank a device's contribution to a disturbance.
///
/// The tracker is armed at the detection onset; the impact angle is the angle
/// (in degrees) of the ray from the arming instant to the current cumulative
/// value, normalized by alpha_max and clamped to [0, 1].
class TeoTracker {
 public:
  explicit TeoTracker(double alpha_max_deg = 90.0, double scale = 1.0);

  void arm(double t_start);
  void disarm();
  bool armed() const { return armed_; }
  double t_start() const;

  /// Feed the next feature sample; accumulates once three samples are seen.
  void push(double sample);

  double cumulative() const { return cumulative_; }

  /// Normalized impact angle in [0, 1]; requires t_now > t_start.
  double impact_angle(double t_now) const;

 private:
  double alpha_max_deg_;
  double scale_;
  bool armed_ = false;
  double t_start_ = 0.0;
  int n_seen_ = 0;
  double x1_ = 0.0;  // previous sample
  double x2_ = 0.0;  // sample before previous
  double cumulative_ = 0.0;
};

}  // namespace flapguard
