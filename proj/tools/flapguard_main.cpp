#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flapguard/config.hpp"
#include "flapguard/csv.hpp"
#include "flapguard/detector.hpp"
#include "flapguard/errors.hpp"
#include "flapguard/scenarios.hpp"
#include "flapguard/sim_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flapguard;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonUniform = 4;

/// CONFIG is either a config file path or a bare built-in scenario name.
ParamMap resolve_config(const std::string& config_arg) {
  if (fs::exists(config_arg)) return load_config_file(config_arg);
  scenario_kind_from_string(config_arg);  // validate the bare name
  ParamMap params;
  params["scenario"] = config_arg;
  return params;
}

void apply_seed(ParamMap& params, const std::optional<std::uint64_t>& seed_flag) {
  if (seed_flag) {
    params["seed"] = std::to_string(*seed_flag);
    return;
  }
  if (params.count("seed")) return;
  if (const char* env = std::getenv("FLAPGUARD_SEED")) params["seed"] = env;
}

json summary_json(const ParamMap& resolved, const RunResult& result,
                  const ScenarioModel& model) {
  json j;
  j["scenario"] = resolved.at("scenario");
  j["seed"] = resolved.at("seed");

  json counts = json::object();
  for (EventKind kind : {EventKind::DfrSwitch, EventKind::Tap, EventKind::Block,
                         EventKind::FlagUp, EventKind::FlagDown, EventKind::Eval,
                         EventKind::Mitigate, EventKind::GainSwitch, EventKind::TeoSnapshot}) {
    counts[std::string(to_string(kind))] = result.log.count(kind);
  }
  j["event_counts"] = counts;

  json firsts = json::object();
  for (EventKind kind : {EventKind::FlagUp, EventKind::Mitigate, EventKind::Block,
                         EventKind::GainSwitch}) {
    const double t = result.log.first_time(kind);
    if (t >= 0.0) firsts[std::string(to_string(kind))] = t;
  }
  j["first_times"] = firsts;

  json per_device = json::object();
  for (const Event& e : result.log.events()) {
    if (e.kind != EventKind::FlagUp) continue;
    const std::string key = std::to_string(e.device_id);
    if (!per_device.contains(key)) per_device[key] = e.t;
  }
  j["first_flag_up_by_device"] = per_device;

  json finals = json::object();
  json steady = json::object();
  const std::size_t n = result.time.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  for (std::size_t c = 0; c < result.names.size(); ++c) {
    const auto& col = result.columns[c];
    if (col.empty()) continue;
    finals[result.names[c]] = col.back();
    double mean = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) mean += col[i];
    mean /= static_cast<double>(tail);
    double var = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) var += (col[i] - mean) * (col[i] - mean);
    var /= static_cast<double>(tail);
    steady[result.names[c]] = {{"mean", mean}, {"std", std::sqrt(var)}};
  }
  j["final_values"] = finals;
  j["steady_state_tail"] = steady;

  json diag = json::object();
  for (const auto& [k, v] : model.diagnostics()) diag[k] = v;
  j["diagnostics"] = diag;
  return j;
}

struct RunOutcome {
  int exit_code = kExitOk;
  json summary;
};

RunOutcome do_run(ParamMap params, const std::string& out_dir, bool quiet,
                  const std::string& config_desc) {
  RunOutcome outcome;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioBuild build = build_scenario(params);
    RunResult result = run(*build.model, build.sim);

    fs::create_directories(out_dir);
    const std::string ts_path = out_dir + "/timeseries.csv";
    const std::string ev_path = out_dir + "/events.csv";
    write_timeseries_csv(result, ts_path);
    write_events_csv(result.log, ev_path);

    outcome.summary = summary_json(build.resolved, result, *build.model);
    {
      std::ofstream out(out_dir + "/summary.json");
      out << outcome.summary.dump(2) << "\n";
    }

    const std::string resolved_text = canonical_text(build.resolved);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest;
    manifest["config"] = config_desc;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(resolved_text)));
    manifest["config_hash"] = hash_hex;
    manifest["seed"] = build.sim.seed;
    manifest["tool_version"] = kVersion;
    manifest["outputs"] = {ts_path, ev_path, out_dir + "/summary.json"};
    manifest["wall_clock_seconds"] = duration;
    manifest["resolved_config"] = resolved_text;
    {
      std::ofstream out(out_dir + "/manifest.json");
      out << manifest.dump(2) << "\n";
    }

    if (!quiet) {
      std::cout << "run complete: " << result.time.size() << " samples, "
                << result.log.size() << " events -> " << out_dir << "\n";
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    outcome.exit_code = kExitConfig;
  } catch (const AlgebraicSolveFailed& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    outcome.exit_code = kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    outcome.exit_code = kExitNumerical;
  }
  return outcome;
}

int do_detect(const std::string& csv_path, DetectorConfig cfg, const std::string& out_path,
              bool quiet) {
  std::vector<double> t, v;
  try {
    std::tie(t, v) = read_series_csv(csv_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitConfig;
  }
  out << "t_s,r_star,k_star,counter,flag\n";
  if (t.size() < 2) {
    if (!quiet) std::cout << "no evaluations (need at least 2 samples)\n";
    return kExitOk;
  }

  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6) {
      std::cerr << "error: non-uniform sampling at row " << i << "\n";
      return kExitNonUniform;
    }
  }

  cfg.dt = dt;
  try {
    cfg.validate();
    Detector detector(cfg);
    std::size_t evals = 0;
    bool final_flag = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const DetectionOutput o = detector.step(v[i]);
      if (o.evaluated) {
        ++evals;
        out << format_sig9(t[i]) << "," << format_sig9(o.r_star) << "," << o.k_star << ","
            << o.counter << "," << (o.flag ? 1 : 0) << "\n";
      }
      final_flag = o.flag;
    }
    if (!quiet) {
      std::cout << evals << " evaluations, final flag " << (final_flag ? 1 : 0) << "\n";
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flapguard: autocorrelation-based flapping detection and mitigation simulator"};
  app.require_subcommand(1);

  std::string config_arg, out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_flag;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSV outputs");
  run_cmd->add_option("config", config_arg, "config file or built-in scenario name")->required();
  run_cmd->add_option("--set", overrides, "override config key (key=value, repeatable)");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed_flag, "random seed");
  run_cmd->add_flag("--quiet", quiet, "suppress progress output");

  std::string csv_path, detect_out = "detections.csv";
  DetectorConfig det_cfg;  // defaults match the fast-flapping configuration
  auto* detect_cmd = app.add_subcommand("detect", "replay a CSV stream through one detector");
  detect_cmd->add_option("csv", csv_path, "input CSV with t_s,value columns")->required();
  detect_cmd->add_option("--out", detect_out, "output CSV path");
  detect_cmd->add_option("--window-seconds", det_cfg.window_seconds, "analysis window T_w");
  detect_cmd->add_option("--shift-seconds", det_cfg.shift_seconds, "evaluation shift T_s");
  detect_cmd->add_option("--t-min", det_cfg.t_min, "smallest expected period (s)");
  detect_cmd->add_option("--t-max", det_cfg.t_max, "largest expected period (s)");
  detect_cmd->add_option("--r-threshold", det_cfg.r_threshold, "detection threshold R_th");
  detect_cmd->add_option("--epsilon", det_cfg.epsilon, "decay tolerance");
  detect_cmd->add_option("--persistence", det_cfg.persistence, "required consecutive detections");
  detect_cmd->add_option("--sigma-floor", det_cfg.sigma_floor, "degenerate-window floor");
  detect_cmd->add_flag("--quiet", quiet, "suppress progress output");

  std::string sweep_param;
  std::vector<std::string> sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario once per parameter value");
  sweep_cmd->add_option("config", config_arg, "config file or built-in scenario name")->required();
  sweep_cmd->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->delimiter(',');
  sweep_cmd->add_option("--set", overrides, "override config key (key=value, repeatable)");
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--seed", seed_flag, "root random seed");
  sweep_cmd->add_flag("--quiet", quiet, "suppress progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      ParamMap params = resolve_config(config_arg);
      for (const std::string& s : overrides) apply_override(params, s);
      apply_seed(params, seed_flag);
      return do_run(std::move(params), out_dir, quiet, config_arg).exit_code;
    }

    if (detect_cmd->parsed()) {
      return do_detect(csv_path, det_cfg, detect_out, quiet);
    }

    if (sweep_cmd->parsed()) {
      if (sweep_values.empty()) {
        std::cerr << "config error: sweep requires a non-empty --values list\n";
        return kExitConfig;
      }
      ParamMap base = resolve_config(config_arg);
      for (const std::string& s : overrides) apply_override(base, s);
      apply_seed(base, seed_flag);
      const std::uint64_t root_seed =
          base.count("seed") ? std::stoull(base.at("seed")) : 1;

      fs::create_directories(out_dir);
      std::ofstream table(out_dir + "/sweep_summary.csv");
      table << "index,value,seed,exit_code,flag_up_count,first_flag_up,mitigate_count,"
               "block_count\n";
      int worst = kExitOk;
      for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        ParamMap params = base;
        apply_override(params, sweep_param + "=" + sweep_values[i]);
        const std::uint64_t child_seed = root_seed + i;
        params["seed"] = std::to_string(child_seed);
        const std::string child_dir = out_dir + "/run_" + std::to_string(i);
        RunOutcome oc = do_run(std::move(params), child_dir, quiet,
                               config_arg + " [" + sweep_param + "=" + sweep_values[i] + "]");
        worst = std::max(worst, oc.exit_code);
        table << i << "," << sweep_values[i] << "," << child_seed << "," << oc.exit_code;
        if (oc.exit_code == kExitOk) {
          const auto& counts = oc.summary["event_counts"];
          const auto& firsts = oc.summary["first_times"];
          table << "," << counts.value("FLAG_UP", 0)
                << "," << (firsts.contains("FLAG_UP") ? format_sig9(firsts["FLAG_UP"]) : "")
                << "," << counts.value("MITIGATE", 0) << "," << counts.value("BLOCK", 0);
        } else {
          table << ",,,,";
        }
        table << "\n";
      }
      return worst;
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
