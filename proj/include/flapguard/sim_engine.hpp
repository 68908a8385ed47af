#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "flapguard/event_log.hpp"
#include "flapguard/rng.hpp"

namespace flapguard {

struct SimConfig {
  double dt_sim = 0.01;  // integration step (s)
  double t_end = 100.0;
  std::uint64_t seed = 1;
};

/// A scenario plugged into the engine. Continuous states live in the engine's
/// state vector; discrete device state lives inside the model and changes only
/// in discrete_update.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;

  virtual Eigen::VectorXd initial_state() const = 0;

  /// Right-hand side of the continuous dynamics. Algebraic relations (feeder
  /// voltages) are solved inside as needed.
  virtual Eigen::VectorXd derivatives(double t, const Eigen::VectorXd& x) const = 0;

  /// Called by the engine before the run starts (seed-dependent setup).
  virtual void initialize(RngStreams& rng, EventLog& log) { (void)rng, (void)log; }

  /// Discrete device logic, detector feeding and mitigation hooks. Called once
  /// per step after integration; `step` counts completed steps (state is at
  /// time t = step * dt_sim). May mutate x for impulsive disturbances.
  virtual void discrete_update(long step, double t, Eigen::VectorXd& x, RngStreams& rng,
                               EventLog& log) = 0;

  virtual std::vector<std::string> observable_names() const = 0;

  /// Fill one row of observable values at (t, x), in observable_names() order.
  virtual void observe_row(double t, const Eigen::VectorXd& x,
                           std::vector<double>& row) const = 0;

  /// Control/detector intervals that dt_sim must divide (validated at run start).
  virtual std::vector<double> required_intervals() const { return {}; }

  /// Model-specific run statistics (e.g. Newton solver iteration counts).
  virtual std::map<std::string, double> diagnostics() const { return {}; }
};

struct RunResult {
  std::vector<double> time;
  std::vector<std::string> names;                 // observable columns
  std::vector<std::vector<double>> columns;       // one vector per observable
  EventLog log;
};

/// Fixed-step RK4 hybrid run from t=0 to t_end.
RunResult run(ScenarioModel& model, const SimConfig& config);

/// Extract one observable as (t, value) pairs; throws UnknownObservable.
std::pair<std::vector<double>, std::vector<double>> observe(const RunResult& result,
                                                            const std::string& name);

/// One RK4 step of dx/dt = f(t, x). Exposed for convergence tests.
template <typename F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * dt, Eigen::VectorXd(x + 0.5 * dt * k1));
  const Eigen::VectorXd k3 = f(t + 0.5 * dt, Eigen::VectorXd(x + 0.5 * dt * k2));
  const Eigen::VectorXd k4 = f(t + dt, Eigen::VectorXd(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace flapguard
