#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "flapguard/errors.hpp"
#include "flapguard/sim_engine.hpp"

using namespace flapguard;

namespace {

// dx/dt = -x with a unit kick at a fixed step; two observables.
class DecayModel : public ScenarioModel {
 public:
  explicit DecayModel(long kick_step = -1) : kick_step_(kick_step) {}

  Eigen::VectorXd initial_state() const override {
    Eigen::VectorXd x(1);
    x << 1.0;
    return x;
  }

  Eigen::VectorXd derivatives(double, const Eigen::VectorXd& x) const override { return -x; }

  void discrete_update(long step, double t, Eigen::VectorXd& x, RngStreams&,
                       EventLog& log) override {
    if (step == kick_step_) {
      x[0] += 1.0;
      log.append({t, 0, EventKind::DfrSwitch, 1.0});
    }
  }

  std::vector<std::string> observable_names() const override { return {"x", "x_sq"}; }

  void observe_row(double, const Eigen::VectorXd& x, std::vector<double>& row) const override {
    row[0] = x[0];
    row[1] = x[0] * x[0];
  }

  std::vector<double> required_intervals() const override { return {0.1}; }

 private:
  long kick_step_;
};

// Harmonic oscillator for order-of-accuracy checks.
class OscModel : public ScenarioModel {
 public:
  Eigen::VectorXd initial_state() const override {
    Eigen::VectorXd x(2);
    x << 1.0, 0.0;
    return x;
  }
  Eigen::VectorXd derivatives(double, const Eigen::VectorXd& x) const override {
    Eigen::VectorXd d(2);
    d << x[1], -x[0];
    return d;
  }
  void discrete_update(long, double, Eigen::VectorXd&, RngStreams&, EventLog&) override {}
  std::vector<std::string> observable_names() const override { return {"q"}; }
  void observe_row(double, const Eigen::VectorXd& x, std::vector<double>& row) const override {
    row[0] = x[0];
  }
};

}  // namespace

TEST_CASE("run produces an inclusive uniform time grid") {
  DecayModel model;
  const RunResult res = run(model, {0.01, 1.0, 7});
  REQUIRE(res.time.size() == 101);
  CHECK(res.time.front() == 0.0);
  CHECK(res.time.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < res.time.size(); ++i) {
    CHECK(res.time[i] - res.time[i - 1] == doctest::Approx(0.01).epsilon(1e-9));
  }
  REQUIRE(res.names.size() == 2);
  REQUIRE(res.columns.size() == 2);
  CHECK(res.columns[0].size() == res.time.size());
}

TEST_CASE("exponential decay matches the analytic solution") {
  DecayModel model;
  const RunResult res = run(model, {0.01, 5.0, 7});
  const auto [t, x] = observe(res, "x");
  for (std::size_t i = 0; i < t.size(); i += 50) {
    CHECK(x[i] == doctest::Approx(std::exp(-t[i])).epsilon(1e-8));
  }
}

TEST_CASE("observe rejects unknown names") {
  DecayModel model;
  const RunResult res = run(model, {0.01, 0.1, 7});
  CHECK_THROWS_AS(observe(res, "nope"), UnknownObservable);
}

TEST_CASE("discrete kick lands at the step boundary and is logged") {
  DecayModel model(10);  // kick applied after step 10, i.e. at t = 0.1
  const RunResult res = run(model, {0.01, 1.0, 7});
  const auto [t, x] = observe(res, "x");
  // Row 10 records the post-update state.
  CHECK(x[9] == doctest::Approx(std::exp(-0.09)).epsilon(1e-8));
  CHECK(x[10] == doctest::Approx(std::exp(-0.10) + 1.0).epsilon(1e-8));
  REQUIRE(res.log.size() == 1);
  CHECK(res.log.events()[0].t == doctest::Approx(0.1));
  CHECK(res.log.count(EventKind::DfrSwitch) == 1);
  CHECK(res.log.first_time(EventKind::DfrSwitch) == doctest::Approx(0.1));
}

TEST_CASE("dt must divide the model's control intervals") {
  DecayModel model;  // requires 0.1
  CHECK_THROWS_AS(run(model, {0.03, 1.0, 7}), ConfigInvalid);
  CHECK_NOTHROW(run(model, {0.05, 1.0, 7}));
}

TEST_CASE("invalid sim config is rejected") {
  DecayModel model;
  CHECK_THROWS_AS(run(model, {0.0, 1.0, 7}), ConfigInvalid);
  CHECK_THROWS_AS(run(model, {0.01, 0.0, 7}), ConfigInvalid);
}

TEST_CASE("rk4 shows fourth-order convergence on the harmonic oscillator") {
  OscModel model;
  auto f = [&](double t, const Eigen::VectorXd& x) { return model.derivatives(t, x); };
  auto global_error = [&](double dt) {
    Eigen::VectorXd x = model.initial_state();
    const long n = std::lround(10.0 / dt);
    for (long i = 0; i < n; ++i) x = rk4_step(f, i * dt, x, dt);
    return std::abs(x[0] - std::cos(10.0));
  };
  const double e1 = global_error(0.02);
  const double e2 = global_error(0.01);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.8);
  CHECK(order < 4.3);
}

TEST_CASE("identical seeds give bit-identical runs") {
  DecayModel a(10), b(10);
  const RunResult ra = run(a, {0.01, 2.0, 42});
  const RunResult rb = run(b, {0.01, 2.0, 42});
  REQUIRE(ra.time == rb.time);
  REQUIRE(ra.columns == rb.columns);
  REQUIRE(ra.log.size() == rb.log.size());
}

TEST_CASE("event log ordering is enforced") {
  EventLog log;
  log.append({1.0, 0, EventKind::Tap});
  log.append({1.0, 2, EventKind::Tap});
  log.append({2.0, 1, EventKind::Tap});
  SUBCASE("time must not decrease") {
    CHECK_THROWS_AS(log.append({1.5, 0, EventKind::Tap}), std::logic_error);
  }
  SUBCASE("device order within a timestamp") {
    CHECK_THROWS_AS(log.append({2.0, 0, EventKind::Tap}), std::logic_error);
  }
  SUBCASE("counts and first times") {
    log.append({2.0, 1, EventKind::Block});
    CHECK(log.count(EventKind::Tap) == 3);
    CHECK(log.count(EventKind::Tap, 2) == 1);
    CHECK(log.first_time(EventKind::Tap) == doctest::Approx(1.0));
    CHECK(log.first_time(EventKind::Block, 1) == doctest::Approx(2.0));
    CHECK(log.first_time(EventKind::Mitigate) < 0.0);
  }
}

TEST_CASE("event kind names") {
  CHECK(to_string(EventKind::DfrSwitch) == "DFR_SWITCH");
  CHECK(to_string(EventKind::Tap) == "TAP");
  CHECK(to_string(EventKind::Block) == "BLOCK");
  CHECK(to_string(EventKind::FlagUp) == "FLAG_UP");
  CHECK(to_string(EventKind::FlagDown) == "FLAG_DOWN");
  CHECK(to_string(EventKind::Eval) == "EVAL");
  CHECK(to_string(EventKind::Mitigate) == "MITIGATE");
  CHECK(to_string(EventKind::GainSwitch) == "GAIN_SWITCH");
  CHECK(to_string(EventKind::TeoSnapshot) == "TEO_SNAPSHOT");
}
