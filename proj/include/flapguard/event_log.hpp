#pragma once

#include <string_view>
#include <vector>

namespace flapguard {

enum class EventKind {
  DfrSwitch,
  Tap,
  Block,
  FlagUp,
  FlagDown,
  Eval,
  Mitigate,
  GainSwitch,
  TeoSnapshot,
};

std::string_view to_string(EventKind kind);

struct Event {
  double t = 0.0;
  int device_id = 0;
  EventKind kind = EventKind::Eval;
  // Kind-specific payload:
  //   DfrSwitch:   p1 = new kappa
  //   Tap:         p1 = new tap, p2 = direction (+1/-1)
  //   Eval:        p1 = r_star, p2 = k_star, p3 = counter
  //   Mitigate:    p1 = new beta
  //   GainSwitch:  p1 = new gain
  //   TeoSnapshot: p1 = cumulative, p2 = alpha_tilde
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
};

/// Ordered record of discrete happenings in a run. Times are non-decreasing;
/// within equal times, device ids are non-decreasing.
class EventLog {
 public:
  void append(Event e);

  const std::vector<Event>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

  std::size_t count(EventKind kind) const;
  std::size_t count(EventKind kind, int device_id) const;

  /// Time of the first event of the given kind, or a negative value if none.
  double first_time(EventKind kind) const;
  double first_time(EventKind kind, int device_id) const;

 private:
  std::vector<Event> events_;
};

}  // namespace flapguard
