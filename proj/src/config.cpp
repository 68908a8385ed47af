#include "flapguard/config.hpp"

#include <fstream>
#include <sstream>

#include "flapguard/errors.hpp"

namespace flapguard {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

ParamMap parse_config_text(const std::string& text) {
  ParamMap params;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigInvalid("config line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigInvalid("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigInvalid("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    params[key] = value;
  }
  return params;
}

ParamMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ParamMap& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigInvalid("override must be key=value: " + assignment);
  }
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  // reuse trimming from the parser
  ParamMap one = parse_config_text(key + " = " + value);
  for (auto& [k, v] : one) params[k] = v;
}

std::string canonical_text(const ParamMap& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ParamReader::ParamReader(const ParamMap& defaults, const ParamMap& user,
                         const std::set<std::string>& passthrough_keys) {
  merged_ = defaults;
  for (const auto& [k, v] : user) {
    if (!defaults.count(k) && !passthrough_keys.count(k)) {
      throw ConfigInvalid("unknown config key: " + k);
    }
    merged_[k] = v;
  }
}

double ParamReader::get_double(const std::string& key) const {
  const std::string& s = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': not a number: " + s);
  }
}

int ParamReader::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw ConfigInvalid("key '" + key + "': not an integer");
  return i;
}

std::uint64_t ParamReader::get_uint64(const std::string& key) const {
  const std::string& s = get_string(key);
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': not an unsigned integer: " + s);
  }
}

bool ParamReader::get_bool(const std::string& key) const {
  const std::string& s = get_string(key);
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigInvalid("key '" + key + "': expected on/off, got " + s);
}

std::string ParamReader::get_string(const std::string& key) const {
  auto it = merged_.find(key);
  if (it == merged_.end()) throw ConfigInvalid("missing config key: " + key);
  return it->second;
}

bool ParamReader::has(const std::string& key) const { return merged_.count(key) > 0; }

}  // namespace flapguard
