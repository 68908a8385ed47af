#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace flapguard {

/// Counter-based per-device random streams.
///
/// Every draw is a pure hash of (root seed, device id, draw index), so a
/// device's sequence never depends on which other devices exist or on the
/// order streams are created.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

  /// Uniform draw in [0, 1) from the device's substream.
  double uniform(int device_id) {
    const std::uint64_t n = counters_[device_id]++;
    return to_unit(hash(seed_, static_cast<std::uint64_t>(device_id), n));
  }

  /// Standard normal via Box-Muller; consumes two uniform draws.
  double gaussian(int device_id) {
    double u1 = uniform(device_id);
    double u2 = uniform(device_id);
    // Avoid log(0).
    u1 = std::max(u1, 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t draws(int device_id) const {
    auto it = counters_.find(device_id);
    return it == counters_.end() ? 0 : it->second;
  }

  std::uint64_t seed() const { return seed_; }

  /// Stateless access, used by tests to replay a substream.
  static double uniform_at(std::uint64_t seed, int device_id, std::uint64_t index) {
    return to_unit(hash(seed, static_cast<std::uint64_t>(device_id), index));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash(std::uint64_t seed, std::uint64_t device, std::uint64_t index) {
    return mix(mix(mix(seed) ^ (device + 0x9e3779b97f4a7c15ULL)) ^ index);
  }

  static double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

  std::uint64_t seed_;
  std::unordered_map<int, std::uint64_t> counters_;
};

}  // namespace flapguard
