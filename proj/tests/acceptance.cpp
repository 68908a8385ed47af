// Acceptance gate: one self-contained check per shipped claim, each printing a
// single PASS/FAIL line. Exit status is nonzero if any check fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "flapguard/detector.hpp"
#include "flapguard/devices.hpp"
#include "flapguard/rng.hpp"
#include "flapguard/scenarios.hpp"
#include "flapguard/signal_engine.hpp"
#include "flapguard/sim_engine.hpp"

using namespace flapguard;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kAcfTol = 1e-12;
constexpr double kRhoSlack = 1e-12;
constexpr double kDetectLatency = 27.0;    // T_w + M * T_s + T_s
constexpr double kUltcBandRth = 0.35;
constexpr double kUltcTailTol = 2e-3;      // +-0.2% of the 1.0 pu setpoint
constexpr double kDfrStdRatio = 0.5;
constexpr double kRk4RelTol = 1e-3;        // 0.1%
constexpr int kMonteCarloRuns = 200;
constexpr int kOrderingMinPass = 190;      // 95% of 200
constexpr double kZThreshold = 3.0;

int g_failures = 0;

void report(int index, const char* what, bool ok, const std::string& detail) {
  std::printf("%2d. %-34s %s%s%s\n", index, what, ok ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  if (!ok) ++g_failures;
}

RunResult run_scenario(ParamMap params) {
  ScenarioBuild build = build_scenario(params);
  return run(*build.model, build.sim);
}

double stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double v : xs) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

std::vector<double> slice(const std::vector<double>& t, const std::vector<double>& v,
                          double t0, double t1) {
  std::vector<double> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t0 && t[i] <= t1) out.push_back(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

void check_lag_bounds() {
  const LagBand fast = lag_bounds(0.9, 1.1, 0.1);
  const LagBand slow = lag_bounds(80.0, 120.0, 1.0);
  const bool ok = fast.k_min == 9 && fast.k_max == 11 && slow.k_min == 80 && slow.k_max == 120;
  std::ostringstream d;
  d << "(" << fast.k_min << "," << fast.k_max << ") (" << slow.k_min << "," << slow.k_max << ")";
  report(1, "lag bound reproduction", ok, d.str());
}

void check_acf_oracle() {
  RngStreams rng(2024);
  double worst = 0.0;
  double worst_rho = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 10 + trial % 291;  // N <= 300
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.gaussian(trial);
    const int max_lag = n - 1;
    const Eigen::VectorXd rhat = biased_acf(x, max_lag);
    for (int k = 0; k <= max_lag; ++k) {
      double direct = 0.0;
      for (int m = 0; m + k < n; ++m) direct += x[m] * x[m + k];
      direct /= n;
      worst = std::max(worst, std::abs(rhat[k] - direct));
    }
    const Eigen::VectorXd rho = normalized_acf(rhat);
    for (int k = 0; k <= max_lag; ++k) worst_rho = std::max(worst_rho, std::abs(rho[k]));
  }
  const bool ok = worst <= kAcfTol && worst_rho <= 1.0 + kRhoSlack;
  std::ostringstream d;
  d << "max err " << worst << ", max |rho| " << worst_rho;
  report(2, "ACF vs direct-sum oracle", ok, d.str());
}

DetectorConfig fast_detector() {
  DetectorConfig c;
  c.dt = 0.1;
  c.window_seconds = 12.0;
  c.shift_seconds = 3.0;
  c.t_min = 0.9;
  c.t_max = 1.1;
  c.r_threshold = 0.90;
  c.epsilon = 1e-3;
  c.persistence = 4;
  return c;
}

// Sustained sinusoids across the whole period band must flag within
// kDetectLatency; decaying ones must never flag. Known limitation: when the
// period is not a divisor of the evaluation shift (30 samples), the window
// phase slides between evaluations and the ACF peak wobbles by up to ~1.5e-3,
// which exceeds epsilon=1e-3 and resets the persistence counter. Periods 0.9
// and 1.1 therefore miss the latency bound for many phases and this check
// reports FAIL. That is inherent to the estimator/tolerance pair, which is
// deliberately left untouched; the false-positive half always passes.
void check_discrimination() {
  RngStreams rng(7);
  int sustained_ok = 0;
  const double periods[] = {0.9, 1.0, 1.1};
  for (int p = 0; p < 3; ++p) {
    for (int ph = 0; ph < 20; ++ph) {
      const double phase = 2.0 * M_PI * rng.uniform(p * 20 + ph);
      Detector det(fast_detector());
      double t_flag = -1.0;
      for (long i = 0; i < 400 && t_flag < 0.0; ++i) {
        const double t = (i + 1) * 0.1;
        const auto out = det.step(std::sin(2.0 * M_PI * i * 0.1 / periods[p] + phase));
        if (out.flag_rising_edge) t_flag = t;
      }
      if (t_flag > 0.0 && t_flag <= kDetectLatency + 1e-9) ++sustained_ok;
    }
  }
  int decaying_flags = 0;
  for (double tau : {2.0, 4.0, 6.0}) {
    Detector det(fast_detector());
    for (long i = 0; i < 1200; ++i) {
      const double t = i * 0.1;
      const auto out = det.step(std::exp(-t / tau) * std::sin(2.0 * M_PI * t));
      if (out.flag_rising_edge) ++decaying_flags;
    }
  }
  const bool ok = sustained_ok == 60 && decaying_flags == 0;
  std::ostringstream d;
  d << sustained_ok << "/60 sustained flagged, " << decaying_flags << " false flags";
  report(3, "detector discrimination", ok, d.str());
}

// Best-evaluation lag and cycle count for one ULTC from a run log.
struct UltcCycleStats {
  int k_dominant = -1;
  double r_best = 0.0;
  int reversals = 0;
};

UltcCycleStats ultc_stats(const RunResult& res, int device) {
  UltcCycleStats s;
  double last_dir = 0.0;
  for (const Event& e : res.log.events()) {
    if (e.device_id != device) continue;
    if (e.kind == EventKind::Eval && e.p1 > kUltcBandRth && e.p1 > s.r_best) {
      s.r_best = e.p1;
      s.k_dominant = static_cast<int>(e.p2);
    }
    if (e.kind == EventKind::Tap) {
      if (last_dir != 0.0 && e.p2 != last_dir) ++s.reversals;
      last_dir = e.p2;
    }
  }
  return s;
}

void check_ultc_cycle() {
  ParamMap p = {{"scenario", "ultc_cascade"}, {"mitigation", "off"}};
  const RunResult res = run_scenario(p);
  const UltcCycleStats s1 = ultc_stats(res, 1);
  const UltcCycleStats s2 = ultc_stats(res, 2);
  const bool in_band = s1.k_dominant >= 80 && s1.k_dominant <= 120 && s2.k_dominant >= 80 &&
                       s2.k_dominant <= 120 && std::abs(s1.k_dominant - s2.k_dominant) <= 1;
  // A full cycle is one up-down (or down-up) tap excursion pair.
  const bool cycles = s1.reversals / 2 >= 5 && s2.reversals / 2 >= 5;
  const bool ok = in_band && cycles && res.log.count(EventKind::Block) == 0;
  std::ostringstream d;
  d << "k* " << s1.k_dominant << "/" << s2.k_dominant << ", cycles " << s1.reversals / 2 << "/"
    << s2.reversals / 2;
  report(4, "ULTC cascade cycling in band", ok, d.str());
}

void check_ultc_mitigation() {
  ParamMap p = {{"scenario", "ultc_cascade"}};
  const RunResult res = run_scenario(p);

  // Upstream persistence counter must run 1,2,3,4 on consecutive evaluations
  // starting at the first qualifying window, with the BLOCK on the fourth.
  std::vector<const Event*> evals;
  double block_t = -1.0;
  int blocks_up = 0;
  for (const Event& e : res.log.events()) {
    if (e.device_id != 1) continue;
    if (e.kind == EventKind::Eval) evals.push_back(&e);
    if (e.kind == EventKind::Block) {
      ++blocks_up;
      block_t = e.t;
    }
  }
  bool clean = false;
  for (std::size_t i = 0; i + 3 < evals.size(); ++i) {
    if (evals[i]->p3 == 1.0) {
      clean = evals[i + 1]->p3 == 2.0 && evals[i + 2]->p3 == 3.0 && evals[i + 3]->p3 == 4.0 &&
              evals[i + 3]->t == block_t;
      // Nothing may qualify before this window.
      for (std::size_t j = 0; j < i; ++j) clean = clean && evals[j]->p3 == 0.0;
      break;
    }
  }

  // After the final BLOCK the downstream transformer re-establishes control:
  // its regulated voltage holds the setpoint to +-0.2% over the last 300 s.
  const auto [t, v2] = observe(res, "v2");
  const double t_end = t.back();
  double dev_max = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_end - 300.0) dev_max = std::max(dev_max, std::abs(v2[i] - 1.0));
  }
  const double last_block = res.log.events().empty() ? -1.0 : [&] {
    double tb = -1.0;
    for (const Event& e : res.log.events()) {
      if (e.kind == EventKind::Block) tb = e.t;
    }
    return tb;
  }();
  const bool ok = blocks_up == 1 && clean && last_block > 0.0 && last_block <= t_end - 300.0 &&
                  dev_max <= kUltcTailTol;
  std::ostringstream d;
  d << "block at t=" << block_t << ", tail |v2-1| " << dev_max;
  report(5, "ULTC upstream block + settle", ok, d.str());
}

struct DfrOutcome {
  bool detected = false;
  bool mitigated = false;
  double ratio = 1e9;
};

DfrOutcome dfr_run(int seed, const std::string& inertia) {
  ParamMap p = {{"scenario", "dfr_frequency"}, {"seed", std::to_string(seed)}};
  if (!inertia.empty()) p["plant.inertia"] = inertia;
  const RunResult res = run_scenario(p);
  DfrOutcome out;
  const double t_detect = res.log.first_time(EventKind::FlagUp);
  const double t_mitigate = res.log.first_time(EventKind::Mitigate);
  out.detected = t_detect >= 0.0;
  out.mitigated = t_mitigate >= 0.0;
  if (!out.detected || !out.mitigated) return out;
  const auto [t, p_dfr] = observe(res, "p_dfr");
  const double before = stddev(slice(t, p_dfr, t_detect - 60.0, t_detect));
  const double after = stddev(slice(t, p_dfr, t_mitigate, t_mitigate + 60.0));
  out.ratio = before > 0.0 ? after / before : 1e9;
  return out;
}

void check_dfr_mitigation() {
  int pass = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    const DfrOutcome out = dfr_run(seed, "");
    if (out.detected && out.mitigated && out.ratio <= kDfrStdRatio) ++pass;
    worst = std::max(worst, out.ratio);
  }
  std::ostringstream d;
  d << pass << "/20 seeds, worst std ratio " << worst;
  report(6, "DFR mitigation effect", pass >= 19, d.str());
}

void check_dfr_low_inertia() {
  int detected = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    if (dfr_run(seed, "0.9").detected) ++detected;  // 1.5 * 0.6
  }
  std::ostringstream d;
  d << detected << "/20 seeds detected";
  report(7, "DFR detection at 0.6x inertia", detected >= 19, d.str());
}

void check_teo_ranking() {
  int order_ok = 0;
  int largest_first = 0;
  int smallest_first = 0;
  for (int seed = 1; seed <= kMonteCarloRuns; ++seed) {
    ParamMap p = {{"scenario", "avr_limit_cycle"}, {"seed", std::to_string(seed)}};
    const RunResult res = run_scenario(p);

    // First control tick at which every device reported a Teager snapshot.
    std::map<double, std::map<int, std::pair<double, double>>> snaps;  // t -> id -> (cum, alpha)
    for (const Event& e : res.log.events()) {
      if (e.kind == EventKind::TeoSnapshot) snaps[e.t][e.device_id] = {e.p1, e.p2};
    }
    double t0 = -1.0;
    for (const auto& [t, by_dev] : snaps) {
      if (by_dev.size() == 5) {
        t0 = t;
        break;
      }
    }
    if (t0 < 0.0 && !snaps.empty()) t0 = snaps.begin()->first;
    if (t0 < 0.0) {
      ++order_ok;  // no detection, nothing to rank
      continue;
    }
    const auto& first = snaps[t0];

    // Oscillation amplitude per device over the control interval leading into
    // the snapshot (the trajectory is mitigation-free until the first switch).
    std::map<int, double> amp;
    for (const auto& [id, cum_alpha] : first) {
      const auto [t, ed] = observe(res, "ed" + std::to_string(id));
      double a = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t0 - 5.0 && t[i] <= t0) a = std::max(a, std::abs(ed[i]));
      }
      amp[id] = a;
    }
    bool match = true;
    for (const auto& [i, ai] : amp) {
      for (const auto& [j, aj] : amp) {
        if (i >= j) continue;
        if (std::max(ai, aj) < 1.2 * std::min(ai, aj)) continue;
        const bool teo_order = first.at(i).first > first.at(j).first;
        if ((ai > aj) != teo_order) match = false;
      }
    }
    if (match) ++order_ok;

    double t_first_switch = 1e18;
    std::set<int> first_switchers;
    for (const Event& e : res.log.events()) {
      if (e.kind != EventKind::GainSwitch) continue;
      if (e.t < t_first_switch) {
        t_first_switch = e.t;
        first_switchers.clear();
      }
      if (e.t == t_first_switch) first_switchers.insert(e.device_id);
    }
    if (!first_switchers.empty()) {
      int id_max = -1, id_min = -1;
      double a_max = -1.0, a_min = 2.0;
      for (const auto& [id, cum_alpha] : first) {
        if (cum_alpha.second > a_max) a_max = cum_alpha.second, id_max = id;
        if (cum_alpha.second < a_min) a_min = cum_alpha.second, id_min = id;
      }
      if (first_switchers.count(id_max)) ++largest_first;
      if (first_switchers.count(id_min)) ++smallest_first;
    }
  }
  const double n = kMonteCarloRuns;
  const double p1 = largest_first / n;
  const double p2 = smallest_first / n;
  const double pooled = (largest_first + smallest_first) / (2.0 * n);
  const double se = std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
  const double z = se > 0.0 ? (p1 - p2) / se : 0.0;
  const bool ok = order_ok >= kOrderingMinPass && z >= kZThreshold;
  std::ostringstream d;
  d << order_ok << "/" << kMonteCarloRuns << " orderings, first-switch " << largest_first << " vs "
    << smallest_first << ", z=" << z;
  report(8, "TEO ranking and switch order", ok, d.str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_determinism() {
  const fs::path base = fs::temp_directory_path() / "flapguard_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const struct {
    const char* scenario;
    const char* t_end;
  } cases[] = {{"dfr_frequency", "15"}, {"ultc_cascade", "350"}, {"avr_limit_cycle", "30"}};
  bool ok = true;
  for (const auto& c : cases) {
    for (const char* tag : {"a", "b"}) {
      const std::string cmd = std::string(FLAPGUARD_CLI_PATH) + " run " + c.scenario +
                              " --set t_end=" + c.t_end + " --seed 5 --quiet --out " +
                              (base / c.scenario / tag).string() + " >/dev/null 2>&1";
      ok = ok && WEXITSTATUS(std::system(cmd.c_str())) == 0;
    }
    for (const char* f : {"timeseries.csv", "events.csv"}) {
      ok = ok && slurp(base / c.scenario / "a" / f) == slurp(base / c.scenario / "b" / f);
    }
  }
  fs::remove_all(base);
  report(9, "byte-identical reruns", ok, "");
}

void check_rk4_load() {
  ExpRecoveryLoad load;
  load.t_p = 10.0;
  load.t_q = 5.0;
  load.p0 = 2.0;
  load.q0 = 0.5;
  const double v = 0.95;
  const double x_inf = load.p0 - load.p0 * v * v;
  auto f = [&](double, const Eigen::VectorXd& x) {
    Eigen::VectorXd dx(1);
    dx[0] = exp_load_derivatives(load, x[0], 0.0, v).dx_p;
    return dx;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  double t = 0.0;
  double err1 = 0.0, err2 = 0.0;
  while (t < 2.0 * load.t_p - 1e-9) {
    x = rk4_step(f, t, x, 0.1);
    t += 0.1;
    const double analytic = x_inf * (1.0 - std::exp(-t / load.t_p));
    if (std::abs(t - load.t_p) < 1e-9) err1 = std::abs(x[0] - analytic) / analytic;
    if (std::abs(t - 2.0 * load.t_p) < 1e-9) err2 = std::abs(x[0] - analytic) / analytic;
  }
  const bool ok = err1 <= kRk4RelTol && err2 <= kRk4RelTol;
  std::ostringstream d;
  d << "rel err " << err1 << " @T_p, " << err2 << " @2T_p";
  report(10, "exp-load RK4 convergence", ok, d.str());
}

}  // namespace

int main() {
  check_lag_bounds();
  check_acf_oracle();
  check_discrimination();
  check_ultc_cycle();
  check_ultc_mitigation();
  check_dfr_mitigation();
  check_dfr_low_inertia();
  check_teo_ranking();
  check_determinism();
  check_rk4_load();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
