#pragma once

#include <optional>
#include <span>

namespace flapguard {

// ---------------------------------------------------------------------------
// Discrete flexible resources (stochastic on/off loads)
// ---------------------------------------------------------------------------

struct DfrUnit {
  int id = 0;
  double p_step = 0.01;           // per-unit power when on
  int kappa = 0;                  // on/off state
  double beta = 1.0;              // current modulation factor
  double beta_init = 1.0;
  double mitigation_scale = 0.3;  // a in [0,1]
  double omega_threshold = 0.01;  // activation dead-band (pu)
  double ctrl_interval = 0.1;     // decision cadence (s)
  double hold_time = 30.0;        // seconds before beta is restored after flag falls
  bool mitigated = false;
  std::optional<double> release_at;  // scheduled restore time
};

/// Activation level u = clamp((dw + dw_thr) / (2 dw_thr), 0, 1).
double dfr_activation_signal(double delta_omega, double omega_threshold);

/// Stochastic switching rule: kappa = 1 iff x <= beta * u.
int dfr_switch(const DfrUnit& unit, double u, double x);

/// On a detector rising edge: beta = a * beta_init (never compounded).
void dfr_mitigate(DfrUnit& unit);

/// On a falling edge: schedule beta restoration after the hold time.
void dfr_schedule_release(DfrUnit& unit, double t_now);

/// Restore beta once the hold timer expires. Returns true on restore.
bool dfr_maybe_release(DfrUnit& unit, double t_now);

/// Sum of kappa_i * p_step_i over the population.
double dfr_aggregate_power(std::span<const DfrUnit> units);

// ---------------------------------------------------------------------------
// Under-load tap changer
// ---------------------------------------------------------------------------

struct UltcState {
  int id = 0;
  double tap = 1.0;     // turns ratio m
  double step = 0.02;   // pu per tap action
  double m_min = 0.8;
  double m_max = 1.2;
  double v_min = 0.99;  // deadband (pu)
  double v_max = 1.01;
  double delay = 53.0;  // minimum spacing between tap actions (s)
  double next_allowed_time = 0.0;
  bool blocked = false;
  int persistence_m = 4;  // detector persistence assigned to this device
};

enum class TapMove { None, Up, Down };

/// One control evaluation against the regulated bus voltage. Raising the tap
/// lowers the downstream voltage. Honors the deadband, the inter-tap delay,
/// the tap limits and the blocking state.
TapMove ultc_step(UltcState& state, double v, double t_now);

/// Blocking mitigation: the tap freezes permanently. Idempotent.
void ultc_block(UltcState& state);

// ---------------------------------------------------------------------------
// Exponential recovery load
// ---------------------------------------------------------------------------

struct ExpRecoveryLoad {
  double t_p = 10.0;  // s
  double t_q = 5.0;   // s
  double p0 = 2.0;    // pu, p_s = p0, p_t = p0 v^2
  double q0 = 0.5;    // pu, q_s = q0, q_t = q0 v
  // true: consumed power p = p_t - x_p (as printed in the source model);
  // false: standard recovery form p = p_t + x_p.
  bool paper_sign_convention = true;
};

struct LoadDerivatives {
  double dx_p = 0.0;
  double dx_q = 0.0;
  double p = 0.0;  // consumed active power
  double q = 0.0;  // consumed reactive power
};

LoadDerivatives exp_load_derivatives(const ExpRecoveryLoad& load, double x_p, double x_q,
                                     double v);

// ---------------------------------------------------------------------------
// AVR gain switcher
// ---------------------------------------------------------------------------

struct AvrGainSwitcher {
  int id = 0;
  double k_init = 280.0;
  double k_safe = 150.0;
  double k_current = 280.0;
  double ctrl_interval = 5.0;  // M_ctrl (s)
  bool latch = true;           // stay at k_safe once switched
};

/// Probabilistic gain switching: k_safe if x <= alpha_tilde, else k_init.
/// With latching enabled a switched device never reverts.
/// Returns the updated gain.
double avr_gain_decision(AvrGainSwitcher& sw, double alpha_tilde, double x);

}  // namespace flapguard
