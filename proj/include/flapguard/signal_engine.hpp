#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "flapguard/sample_window.hpp"

namespace flapguard {

struct WindowStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (divide by N)
  std::size_t n = 0;
};

struct NormalizedWindow {
  Eigen::VectorXd x;       // zero-mean, unit-variance samples (all zeros if degenerate)
  bool degenerate = false; // sigma below the floor, no oscillation present
};

struct LagBand {
  int k_min = 1;
  int k_max = 1;
};

struct BandPeak {
  double r_star = 0.0;
  int k_star = 0;
};

struct AcfResult {
  Eigen::VectorXd rho;  // rho[0..k_max]
  LagBand band;
  double r_star = 0.0;
  int k_star = 0;
  bool degenerate = false;
};

/// Population mean and standard deviation of a full window.
WindowStats window_stats(const SampleWindow& window);

/// (f - mu) / sigma per sample. A window with sigma below sigma_floor is
/// returned as all zeros and marked degenerate.
NormalizedWindow normalize_window(const SampleWindow& window, const WindowStats& stats,
                                  double sigma_floor);

/// Biased sample autocorrelation: Rhat[k] = (1/N) sum_{n=0}^{N-k-1} x[n] x[n+k].
Eigen::VectorXd biased_acf(const Eigen::Ref<const Eigen::VectorXd>& x, int max_lag);

/// rho[k] = Rhat[k] / Rhat[0].
Eigen::VectorXd normalized_acf(const Eigen::Ref<const Eigen::VectorXd>& rhat);

/// Convert period bounds in seconds to integer lag indices:
/// k_min = ceil(t_min/dt), k_max = floor(t_max/dt).
/// If n_window > 0, additionally requires k_max < n_window.
LagBand lag_bounds(double t_min, double t_max, double dt, std::size_t n_window = 0);

/// Maximum |rho[k]| over the lag band; ties break to the smallest lag.
BandPeak band_peak(const Eigen::Ref<const Eigen::VectorXd>& rho, const LagBand& band);

/// Full pipeline over one window: stats, normalization, ACF, band peak.
/// Degenerate windows yield r_star = 0 at k_star = band.k_min.
AcfResult window_acf(const SampleWindow& window, const LagBand& band, double sigma_floor);

}  // namespace flapguard
