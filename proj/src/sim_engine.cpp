#include "flapguard/sim_engine.hpp"

#include <cmath>
#include <string>

#include "flapguard/errors.hpp"

namespace flapguard {

namespace {

void validate(const ScenarioModel& model, const SimConfig& config) {
  if (!(config.dt_sim > 0.0)) throw ConfigInvalid("sim: dt_sim must be > 0");
  if (!(config.t_end > 0.0)) throw ConfigInvalid("sim: t_end must be > 0");
  for (double interval : model.required_intervals()) {
    const double ratio = interval / config.dt_sim;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio || std::llround(ratio) < 1) {
      throw ConfigInvalid("sim: dt_sim " + std::to_string(config.dt_sim) +
                          " must divide control interval " + std::to_string(interval));
    }
  }
}

}  // namespace

RunResult run(ScenarioModel& model, const SimConfig& config) {
  validate(model, config);

  RunResult result;
  result.names = model.observable_names();
  result.columns.assign(result.names.size(), {});

  RngStreams rng(config.seed);
  Eigen::VectorXd x = model.initial_state();
  model.initialize(rng, result.log);

  const long n_steps = static_cast<long>(std::llround(config.t_end / config.dt_sim));
  std::vector<double> row(result.names.size());

  auto record = [&](double t) {
    result.time.push_back(t);
    model.observe_row(t, x, row);
    for (std::size_t j = 0; j < row.size(); ++j) result.columns[j].push_back(row[j]);
  };

  record(0.0);
  for (long step = 1; step <= n_steps; ++step) {
    const double t_prev = (step - 1) * config.dt_sim;
    const double t = step * config.dt_sim;
    x = rk4_step([&](double tt, const Eigen::VectorXd& xx) { return model.derivatives(tt, xx); },
                 t_prev, x, config.dt_sim);
    model.discrete_update(step, t, x, rng, result.log);
    record(t);
  }
  return result;
}

std::pair<std::vector<double>, std::vector<double>> observe(const RunResult& result,
                                                            const std::string& name) {
  for (std::size_t j = 0; j < result.names.size(); ++j) {
    if (result.names[j] == name) return {result.time, result.columns[j]};
  }
  throw UnknownObservable("observe: no observable named '" + name + "'");
}

}  // namespace flapguard
