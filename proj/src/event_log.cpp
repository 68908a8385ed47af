#include "flapguard/event_log.hpp"

#include <stdexcept>

namespace flapguard {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::DfrSwitch: return "DFR_SWITCH";
    case EventKind::Tap: return "TAP";
    case EventKind::Block: return "BLOCK";
    case EventKind::FlagUp: return "FLAG_UP";
    case EventKind::FlagDown: return "FLAG_DOWN";
    case EventKind::Eval: return "EVAL";
    case EventKind::Mitigate: return "MITIGATE";
    case EventKind::GainSwitch: return "GAIN_SWITCH";
    case EventKind::TeoSnapshot: return "TEO_SNAPSHOT";
  }
  return "UNKNOWN";
}

void EventLog::append(Event e) {
  if (!events_.empty()) {
    const Event& last = events_.back();
    if (e.t < last.t || (e.t == last.t && e.device_id < last.device_id)) {
      throw std::logic_error("EventLog: out-of-order append");
    }
  }
  events_.push_back(e);
}

std::size_t EventLog::count(EventKind kind) const {
  std::size_t n = 0;
  for (const Event& e : events_) n += (e.kind == kind);
  return n;
}

std::size_t EventLog::count(EventKind kind, int device_id) const {
  std::size_t n = 0;
  for (const Event& e : events_) n += (e.kind == kind && e.device_id == device_id);
  return n;
}

double EventLog::first_time(EventKind kind) const {
  for (const Event& e : events_) {
    if (e.kind == kind) return e.t;
  }
  return -1.0;
}

double EventLog::first_time(EventKind kind, int device_id) const {
  for (const Event& e : events_) {
    if (e.kind == kind && e.device_id == device_id) return e.t;
  }
  return -1.0;
}

}  // namespace flapguard
