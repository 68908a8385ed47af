#include <cmath>
#include <complex>
#include <vector>

#include "flapguard/detector.hpp"
#include "flapguard/devices.hpp"
#include "flapguard/errors.hpp"
#include "flapguard/scenarios.hpp"
#include "scenario_common.hpp"

namespace flapguard {

namespace {

using Complex = std::complex<double>;

struct FeederSolution {
  Complex v1;  // intermediate bus (regulated by the upstream ULTC)
  Complex v2;  // load bus (regulated by the downstream ULTC)
  int iterations = 0;
  double residual = 0.0;
};

/// Radial feeder: source v0 behind series reactance x0, upstream ULTC (ratio
/// m1) to the intermediate bus carrying shunt susceptance b, downstream ULTC
/// (ratio m2) to the load bus. Raising a tap lowers its downstream voltage.
///
/// Unknown is the load-bus phasor V2; KCL at the intermediate bus reads
///   m1 (E - m1 m2 V2) / (j x0) = j b m2 V2 + conj(S) / (m2 conj(V2)),
/// with S the load consumption at |V2|.
class UltcCascadeModel final : public ScenarioModel {
 public:
  UltcCascadeModel(const ParamReader& params)
      : v_source_(params.get_double("feeder.v_source")),
        x_source_(params.get_double("feeder.x_source")),
        shunt_b_(params.get_double("feeder.shunt_b")),
        mitigation_(params.get_bool("mitigation")),
        detectors_enabled_(params.get_bool("detector.enabled")),
        dt_sim_(params.get_double("dt_sim")) {
    load_.t_p = params.get_double("load.t_p");
    load_.t_q = params.get_double("load.t_q");
    load_.p0 = params.get_double("load.p0");
    load_.q0 = params.get_double("load.q0");
    const std::string conv = params.get_string("load.sign_convention");
    if (conv == "paper") {
      load_.paper_sign_convention = true;
    } else if (conv == "standard") {
      load_.paper_sign_convention = false;
    } else {
      throw ConfigInvalid("load.sign_convention must be paper or standard");
    }

    for (int i = 1; i <= 2; ++i) {
      const std::string p = "ultc" + std::to_string(i);
      UltcState u;
      u.id = i;
      u.tap = params.get_double(p + ".m0");
      u.step = params.get_double(p + ".step");
      u.m_min = params.get_double(p + ".m_min");
      u.m_max = params.get_double(p + ".m_max");
      u.v_min = params.get_double(p + ".v_min");
      u.v_max = params.get_double(p + ".v_max");
      u.delay = params.get_double(p + ".delay");
      u.persistence_m = params.get_int(p + ".persistence");
      ultcs_.push_back(u);

      DetectorConfig det = detail::read_detector(params, "detector");
      det.persistence = u.persistence_m;
      det.validate();
      detectors_.emplace_back(det);
    }
    det_dt_ = detectors_.front().config().dt;

    // Load recovery states start at their v = v0 equilibrium.
    const double v = v_source_;
    x0_init_ = Eigen::VectorXd(2);
    x0_init_[0] = load_.p0 - load_.p0 * v * v;
    x0_init_[1] = load_.q0 - load_.q0 * v;
    if (params.has("load.x_p0")) x0_init_[0] = params.get_double("load.x_p0");
    if (params.has("load.x_q0")) x0_init_[1] = params.get_double("load.x_q0");
  }

  Eigen::VectorXd initial_state() const override { return x0_init_; }

  FeederSolution solve_feeder(double x_p, double x_q) const {
    const double m1 = ultcs_[0].tap;
    const double m2 = ultcs_[1].tap;
    const Complex e(v_source_, 0.0);
    const Complex jx0(0.0, x_source_);
    const Complex jb(0.0, shunt_b_);

    auto residual = [&](const Complex& v2) -> Complex {
      const double vm = std::abs(v2);
      const LoadDerivatives ld = exp_load_derivatives(load_, x_p, x_q, std::max(vm, 1e-6));
      const Complex s(ld.p, ld.q);
      return m1 * (e - m1 * m2 * v2) / jx0 - jb * (m2 * v2) - std::conj(s) / (m2 * std::conj(v2));
    };

    Complex v2 = warm_start_;
    double fnorm = std::abs(residual(v2));
    int it = 0;
    const int max_iter = 50;
    const double tol = 1e-12;
    while (fnorm > tol && it < max_iter) {
      ++it;
      const Complex f = residual(v2);
      const double h = 1e-7;
      const Complex fa = residual(v2 + Complex(h, 0.0));
      const Complex fb = residual(v2 + Complex(0.0, h));
      Eigen::Matrix2d jac;
      jac << (fa.real() - f.real()) / h, (fb.real() - f.real()) / h,
             (fa.imag() - f.imag()) / h, (fb.imag() - f.imag()) / h;
      const Eigen::Vector2d rhs(-f.real(), -f.imag());
      const Eigen::Vector2d delta = jac.fullPivLu().solve(rhs);
      // Damped update: halve the step until the residual decreases.
      double lambda = 1.0;
      Complex v2_new = v2;
      double fnorm_new = fnorm;
      for (int halve = 0; halve < 12; ++halve) {
        const Complex cand = v2 + lambda * Complex(delta[0], delta[1]);
        const double fn = std::abs(residual(cand));
        if (fn < fnorm) {
          v2_new = cand;
          fnorm_new = fn;
          break;
        }
        lambda *= 0.5;
      }
      if (fnorm_new >= fnorm) {
        // No improvement even with damping.
        break;
      }
      v2 = v2_new;
      fnorm = fnorm_new;
    }
    if (fnorm > 1e-8) {
      throw AlgebraicSolveFailed("feeder Newton did not converge: residual " +
                                 std::to_string(fnorm));
    }
    warm_start_ = v2;
    newton_max_iters_ = std::max(newton_max_iters_, it);
    newton_max_residual_ = std::max(newton_max_residual_, fnorm);

    FeederSolution sol;
    sol.v2 = v2;
    sol.v1 = m2 * v2;
    sol.iterations = it;
    sol.residual = fnorm;
    return sol;
  }

  Eigen::VectorXd derivatives(double t, const Eigen::VectorXd& x) const override {
    (void)t;
    const FeederSolution sol = solve_feeder(x[0], x[1]);
    const LoadDerivatives ld = exp_load_derivatives(load_, x[0], x[1], std::abs(sol.v2));
    Eigen::VectorXd dx(2);
    dx[0] = ld.dx_p;
    dx[1] = ld.dx_q;
    return dx;
  }

  void discrete_update(long step, double t, Eigen::VectorXd& x, RngStreams& rng,
                       EventLog& log) override {
    (void)rng;
    const FeederSolution sol = solve_feeder(x[0], x[1]);
    const double v[2] = {std::abs(sol.v1), std::abs(sol.v2)};
    const bool det = detectors_enabled_ && detail::on_boundary(step, det_dt_, dt_sim_);

    for (std::size_t i = 0; i < ultcs_.size(); ++i) {
      UltcState& ultc = ultcs_[i];
      const TapMove move = ultc_step(ultc, v[i], t);
      if (move != TapMove::None) {
        log.append({t, ultc.id, EventKind::Tap, ultc.tap,
                    move == TapMove::Up ? 1.0 : -1.0});
      }
      if (det) {
        const DetectionOutput out = detectors_[i].step(v[i]);
        if (out.evaluated) {
          log.append({t, ultc.id, EventKind::Eval, out.r_star,
                      static_cast<double>(out.k_star), static_cast<double>(out.counter)});
        }
        if (out.flag_rising_edge) {
          log.append({t, ultc.id, EventKind::FlagUp});
          if (mitigation_ && !ultc.blocked) {
            ultc_block(ultc);
            log.append({t, ultc.id, EventKind::Block});
          }
        }
        if (out.flag_falling_edge) {
          log.append({t, ultc.id, EventKind::FlagDown});
        }
      }
    }
  }

  std::vector<std::string> observable_names() const override {
    return {"v1", "v2", "m1", "m2", "x_p", "x_q", "p_load", "q_load"};
  }

  void observe_row(double t, const Eigen::VectorXd& x, std::vector<double>& row) const override {
    (void)t;
    const FeederSolution sol = solve_feeder(x[0], x[1]);
    const double v2 = std::abs(sol.v2);
    const LoadDerivatives ld = exp_load_derivatives(load_, x[0], x[1], v2);
    row[0] = std::abs(sol.v1);
    row[1] = v2;
    row[2] = ultcs_[0].tap;
    row[3] = ultcs_[1].tap;
    row[4] = x[0];
    row[5] = x[1];
    row[6] = ld.p;
    row[7] = ld.q;
  }

  std::vector<double> required_intervals() const override { return {det_dt_}; }

  std::map<std::string, double> diagnostics() const override {
    return {{"newton_max_iterations", static_cast<double>(newton_max_iters_)},
            {"newton_max_residual", newton_max_residual_}};
  }

 private:
  double v_source_, x_source_, shunt_b_;
  bool mitigation_;
  bool detectors_enabled_;
  double dt_sim_;
  double det_dt_ = 1.0;
  ExpRecoveryLoad load_;
  Eigen::VectorXd x0_init_;
  std::vector<UltcState> ultcs_;
  std::vector<Detector> detectors_;
  mutable Complex warm_start_{1.0, 0.0};
  mutable int newton_max_iters_ = 0;
  mutable double newton_max_residual_ = 0.0;
};

}  // namespace

std::unique_ptr<ScenarioModel> build_ultc_cascade(const ParamReader& params) {
  return std::make_unique<UltcCascadeModel>(params);
}

}  // namespace flapguard
