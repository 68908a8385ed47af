#pragma once

#include <optional>

#include "flapguard/sample_window.hpp"
#include "flapguard/signal_engine.hpp"

namespace flapguard {

/// All per-device detection parameters.
struct DetectorConfig {
  double dt = 0.1;             // sampling interval (s)
  double window_seconds = 12;  // T_w
  double shift_seconds = 3;    // T_s
  double t_min = 0.9;          // smallest expected flapping period (s)
  double t_max = 1.1;          // largest expected flapping period (s)
  double r_threshold = 0.90;   // R_th in (0,1)
  double epsilon = 1e-3;       // tolerance on metric decay
  int persistence = 4;         // M, required consecutive detections
  double sigma_floor = 1e-9;   // below this the window is degenerate

  int n_window() const;
  int n_shift() const;
  LagBand band() const;
  void validate() const;  // throws ConfigInvalid
};

struct DetectionOutput {
  bool evaluated = false;  // true only on shift boundaries with a full window
  double r_star = 0.0;     // valid when evaluated
  int k_star = 0;          // valid when evaluated
  bool degenerate = false; // valid when evaluated
  int counter = 0;
  bool flag = false;
  bool flag_rising_edge = false;
  bool flag_falling_edge = false;
};

/// Persistence state machine turning a measurement stream into a flapping flag.
///
/// Every n_shift() samples with a full buffer, the peak normalized
/// autocorrelation r* over the lag band is evaluated; the counter increments
/// while r* > R_th and r* has not decayed by more than epsilon since the
/// previous evaluation, and resets to zero otherwise. The flag is set while
/// counter >= persistence.
class Detector {
 public:
  explicit Detector(DetectorConfig config);

  DetectionOutput step(double sample);
  void reset();

  const DetectorConfig& config() const { return config_; }
  int counter() const { return counter_; }
  bool flag() const { return flag_; }
  std::optional<double> prev_r_star() const { return prev_r_star_; }
  const std::optional<AcfResult>& last_eval() const { return last_eval_; }

 private:
  DetectorConfig config_;
  LagBand band_;
  SampleWindow buffer_;
  long samples_since_eval_ = 0;
  bool first_eval_pending_ = true;
  int counter_ = 0;
  bool flag_ = false;
  std::optional<double> prev_r_star_;
  std::optional<AcfResult> last_eval_;
};

}  // namespace flapguard
