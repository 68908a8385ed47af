#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace flapguard {

/// Flat key-value parameter set with dotted keys
/// (e.g. "detector.upstream.r_threshold").
using ParamMap = std::map<std::string, std::string>;

/// Parse the sectioned key=value config format:
///   # comment
///   scenario = ultc_cascade
///   [detector.upstream]
///   r_threshold = 0.35        ->  detector.upstream.r_threshold = 0.35
ParamMap parse_config_text(const std::string& text);

ParamMap load_config_file(const std::string& path);

/// Apply one "key=value" override string; throws ConfigInvalid on bad syntax.
void apply_override(ParamMap& params, const std::string& assignment);

/// Sorted "key = value" lines; stable across platforms for identical content.
std::string canonical_text(const ParamMap& params);

std::uint64_t fnv1a64(std::string_view data);

/// Typed reads over a ParamMap merged with scenario defaults. Every key in
/// `user` must exist in `defaults`, otherwise ConfigInvalid.
class ParamReader {
 public:
  ParamReader(const ParamMap& defaults, const ParamMap& user,
              const std::set<std::string>& passthrough_keys = {});

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  bool get_bool(const std::string& key) const;  // on/off, true/false, 1/0
  std::string get_string(const std::string& key) const;
  bool has(const std::string& key) const;

  /// The fully resolved (defaults + overrides) map.
  const ParamMap& resolved() const { return merged_; }

 private:
  ParamMap merged_;
};

}  // namespace flapguard
