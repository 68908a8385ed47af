#include "flapguard/signal_engine.hpp"

#include <cmath>
#include <string>

#include "flapguard/errors.hpp"

namespace flapguard {

WindowStats window_stats(const SampleWindow& window) {
  if (!window.full()) {
    throw WindowNotFull("window_stats: window has " + std::to_string(window.size()) +
                        " of " + std::to_string(window.capacity()) + " samples");
  }
  const Eigen::VectorXd f = window.chronological();
  WindowStats s;
  s.n = window.size();
  s.mean = f.mean();
  s.std = std::sqrt((f.array() - s.mean).square().mean());
  return s;
}

NormalizedWindow normalize_window(const SampleWindow& window, const WindowStats& stats,
                                  double sigma_floor) {
  if (!window.full()) throw WindowNotFull("normalize_window: window not full");
  NormalizedWindow out;
  const Eigen::VectorXd f = window.chronological();
  if (stats.std < sigma_floor) {
    out.x = Eigen::VectorXd::Zero(f.size());
    out.degenerate = true;
    return out;
  }
  out.x = (f.array() - stats.mean) / stats.std;
  return out;
}

Eigen::VectorXd biased_acf(const Eigen::Ref<const Eigen::VectorXd>& x, int max_lag) {
  const Eigen::Index n = x.size();
  if (max_lag < 0 || max_lag >= n) {
    throw LagOutOfRange("biased_acf: max_lag " + std::to_string(max_lag) +
                        " not in [0, " + std::to_string(n) + ")");
  }
  Eigen::VectorXd rhat(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    rhat[k] = x.head(n - k).dot(x.tail(n - k)) / static_cast<double>(n);
  }
  return rhat;
}

Eigen::VectorXd normalized_acf(const Eigen::Ref<const Eigen::VectorXd>& rhat) {
  if (rhat.size() == 0 || !(rhat[0] > 0.0)) {
    throw DegenerateWindow("normalized_acf: Rhat[0] must be > 0");
  }
  return rhat / rhat[0];
}

LagBand lag_bounds(double t_min, double t_max, double dt, std::size_t n_window) {
  if (!(t_min > 0.0) || !(t_min <= t_max) || !(dt > 0.0)) {
    throw InvalidBand("lag_bounds: need 0 < t_min <= t_max and dt > 0");
  }
  LagBand band;
  band.k_min = static_cast<int>(std::ceil(t_min / dt));
  band.k_max = static_cast<int>(std::floor(t_max / dt));
  if (band.k_min > band.k_max) {
    throw EmptyLagBand("lag_bounds: empty band [" + std::to_string(band.k_min) + ", " +
                       std::to_string(band.k_max) + "]");
  }
  if (n_window > 0 && band.k_max >= static_cast<int>(n_window)) {
    throw InvalidBand("lag_bounds: k_max " + std::to_string(band.k_max) +
                      " must be < window length " + std::to_string(n_window));
  }
  return band;
}

BandPeak band_peak(const Eigen::Ref<const Eigen::VectorXd>& rho, const LagBand& band) {
  if (band.k_min < 1 || band.k_min > band.k_max || band.k_max >= rho.size()) {
    throw EmptyLagBand("band_peak: band [" + std::to_string(band.k_min) + ", " +
                       std::to_string(band.k_max) + "] invalid for rho of length " +
                       std::to_string(rho.size()));
  }
  BandPeak peak;
  peak.r_star = -1.0;
  for (int k = band.k_min; k <= band.k_max; ++k) {
    const double a = std::abs(rho[k]);
    if (a > peak.r_star) {
      peak.r_star = a;
      peak.k_star = k;
    }
  }
  return peak;
}

AcfResult window_acf(const SampleWindow& window, const LagBand& band, double sigma_floor) {
  AcfResult res;
  res.band = band;
  const WindowStats stats = window_stats(window);
  const NormalizedWindow norm = normalize_window(window, stats, sigma_floor);
  if (norm.degenerate) {
    res.degenerate = true;
    res.rho = Eigen::VectorXd::Zero(band.k_max + 1);
    res.r_star = 0.0;
    res.k_star = band.k_min;
    return res;
  }
  res.rho = normalized_acf(biased_acf(norm.x, band.k_max));
  const BandPeak peak = band_peak(res.rho, band);
  res.r_star = peak.r_star;
  res.k_star = peak.k_star;
  return res;
}

}  // namespace flapguard
