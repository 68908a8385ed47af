#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "flapguard/errors.hpp"

namespace flapguard {

/// Fixed-capacity chronological buffer of equally spaced scalar samples.
/// Once full, pushing evicts the oldest sample.
class SampleWindow {
 public:
  SampleWindow(std::size_t capacity, double dt) : buf_(capacity), dt_(dt) {
    if (capacity < 2) throw ConfigInvalid("SampleWindow capacity must be >= 2");
    if (!(dt > 0.0)) throw ConfigInvalid("SampleWindow dt must be > 0");
  }

  void push(double value) {
    buf_[head_] = value;
    head_ = (head_ + 1) % buf_.size();
    if (count_ < buf_.size()) ++count_;
  }

  bool full() const { return count_ == buf_.size(); }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return buf_.size(); }
  double dt() const { return dt_; }

  void clear() {
    head_ = 0;
    count_ = 0;
  }

  /// Contents oldest-to-newest.
  Eigen::VectorXd chronological() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(count_));
    const std::size_t cap = buf_.size();
    const std::size_t start = (head_ + cap - count_) % cap;
    for (std::size_t i = 0; i < count_; ++i) out[static_cast<Eigen::Index>(i)] = buf_[(start + i) % cap];
    return out;
  }

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  double dt_;
};

}  // namespace flapguard
