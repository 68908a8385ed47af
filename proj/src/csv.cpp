#include "flapguard/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flapguard/errors.hpp"

namespace flapguard {

std::string format_sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_timeseries_csv(const RunResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t_s";
  for (const std::string& name : result.names) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < result.time.size(); ++i) {
    out << format_sig9(result.time[i]);
    for (const auto& col : result.columns) out << "," << format_sig9(col[i]);
    out << "\n";
  }
}

void write_events_csv(const EventLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t_s,device_id,kind,p1,p2,p3\n";
  for (const Event& e : log.events()) {
    out << format_sig9(e.t) << "," << e.device_id << "," << to_string(e.kind) << ","
        << format_sig9(e.p1) << "," << format_sig9(e.p2) << "," << format_sig9(e.p3) << "\n";
  }
}

std::pair<std::vector<double>, std::vector<double>> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::vector<double> t, v;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      throw Error("malformed CSV row in " + path + ": " + line);
    }
    try {
      t.push_back(std::stod(a));
      v.push_back(std::stod(b));
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;  // header line
      }
      throw Error("non-numeric CSV row in " + path + ": " + line);
    }
    first = false;
  }
  return {t, v};
}

}  // namespace flapguard
