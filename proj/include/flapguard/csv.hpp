#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flapguard/event_log.hpp"
#include "flapguard/sim_engine.hpp"

namespace flapguard {

/// Fixed 9-significant-digit decimal formatting used by all CSV output.
std::string format_sig9(double value);

/// Column 1 is t_s, then one column per observable.
void write_timeseries_csv(const RunResult& result, const std::string& path);

/// Columns: t_s, device_id, kind, p1, p2, p3.
void write_events_csv(const EventLog& log, const std::string& path);

/// Read a two-column (t_s, value) CSV; a non-numeric first line is treated as
/// a header and skipped.
std::pair<std::vector<double>, std::vector<double>> read_series_csv(const std::string& path);

}  // namespace flapguard
