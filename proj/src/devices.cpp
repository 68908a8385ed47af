#include "flapguard/devices.hpp"

#include <algorithm>
#include <cmath>

#include "flapguard/errors.hpp"

namespace flapguard {

double dfr_activation_signal(double delta_omega, double omega_threshold) {
  if (!(omega_threshold > 0.0)) throw ConfigInvalid("dfr: omega_threshold must be > 0");
  const double u = (delta_omega + omega_threshold) / (2.0 * omega_threshold);
  return std::clamp(u, 0.0, 1.0);
}

int dfr_switch(const DfrUnit& unit, double u, double x) {
  return x <= unit.beta * u ? 1 : 0;
}

void dfr_mitigate(DfrUnit& unit) {
  unit.beta = unit.mitigation_scale * unit.beta_init;
  unit.mitigated = true;
  unit.release_at.reset();
}

void dfr_schedule_release(DfrUnit& unit, double t_now) {
  if (unit.mitigated) unit.release_at = t_now + unit.hold_time;
}

bool dfr_maybe_release(DfrUnit& unit, double t_now) {
  if (unit.release_at && t_now >= *unit.release_at) {
    unit.beta = unit.beta_init;
    unit.mitigated = false;
    unit.release_at.reset();
    return true;
  }
  return false;
}

double dfr_aggregate_power(std::span<const DfrUnit> units) {
  double total = 0.0;
  for (const DfrUnit& u : units) total += u.kappa * u.p_step;
  return total;
}

TapMove ultc_step(UltcState& state, double v, double t_now) {
  if (state.blocked || t_now < state.next_allowed_time) return TapMove::None;
  if (v > state.v_max && state.tap < state.m_max) {
    state.tap = std::min(state.tap + state.step, state.m_max);
    state.next_allowed_time = t_now + state.delay;
    return TapMove::Up;
  }
  if (v < state.v_min && state.tap > state.m_min) {
    state.tap = std::max(state.tap - state.step, state.m_min);
    state.next_allowed_time = t_now + state.delay;
    return TapMove::Down;
  }
  return TapMove::None;
}

void ultc_block(UltcState& state) { state.blocked = true; }

LoadDerivatives exp_load_derivatives(const ExpRecoveryLoad& load, double x_p, double x_q,
                                     double v) {
  if (!(v > 0.0)) throw ConfigInvalid("exp_load: v must be > 0");
  const double p_t = load.p0 * v * v;
  const double q_t = load.q0 * v;
  LoadDerivatives d;
  d.dx_p = (load.p0 - p_t - x_p) / load.t_p;
  d.dx_q = (load.q0 - q_t - x_q) / load.t_q;
  if (load.paper_sign_convention) {
    d.p = p_t - x_p;
    d.q = q_t - x_q;
  } else {
    d.p = p_t + x_p;
    d.q = q_t + x_q;
  }
  return d;
}

double avr_gain_decision(AvrGainSwitcher& sw, double alpha_tilde, double x) {
  if (sw.latch && sw.k_current == sw.k_safe) return sw.k_current;
  sw.k_current = (x <= alpha_tilde) ? sw.k_safe : sw.k_init;
  return sw.k_current;
}

}  // namespace flapguard
