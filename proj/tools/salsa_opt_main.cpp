// salsa_opt: run stochastic-optimization experiments with statistical
// step-size control, sweep grids, derive plot tables, and self-check.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "salsa/artifacts.hpp"
#include "salsa/checks.hpp"
#include "salsa/errors.hpp"
#include "salsa/run_config.hpp"
#include "salsa/runner.hpp"
#include "salsa/stats.hpp"
#include "salsa/sweep.hpp"
#include "salsa/vec.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw salsa::ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw salsa::ConfigError(path + ": invalid JSON: " + e.what());
  }
}

ordered_json load_ordered_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw salsa::ConfigError("cannot open config file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw salsa::ConfigError(path + ": invalid JSON: " + e.what());
  }
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides,
            const std::string& out_dir, long long seed, bool have_seed) {
  json doc = load_json_file(config_path);
  for (const std::string& ov : overrides) salsa::apply_override(doc, ov);
  if (have_seed) doc["seed"] = seed;

  const salsa::ResolvedConfig cfg = salsa::parse_run_config(doc);
  const salsa::RunResult res = salsa::run_experiment(cfg);
  salsa::write_run_artifacts(res, out_dir);

  std::printf("run complete: %lld iterations, scheduler=%s\n",
              static_cast<long long>(cfg.total_iters),
              salsa::scheduler_name(cfg.scheduler));
  std::printf("  final alpha        %.8g\n", res.final_alpha);
  std::printf("  final loss (ema)   %.8g\n", res.final_loss_smooth);
  std::printf("  objective initial  %.8g\n", res.objective_initial);
  std::printf("  objective final    %.8g\n", res.objective_final);
  std::printf("  drops              %zu\n", res.drops.size());
  if (res.switch_iteration >= 0)
    std::printf("  switch iteration   %lld\n",
                static_cast<long long>(res.switch_iteration));
  std::printf("  artifacts          %s\n", out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& overrides,
              const std::string& out_dir, int threads) {
  ordered_json doc = load_ordered_json_file(config_path);
  if (!overrides.empty()) {
    if (!doc.contains("base") || !doc["base"].is_object())
      throw salsa::ConfigError("sweep config: 'base' object is required");
    json base = doc["base"];
    for (const std::string& ov : overrides) salsa::apply_override(base, ov);
    doc["base"] = base;
  }
  const auto results = salsa::run_sweep(doc, out_dir, threads);
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::printf("point %04lld ok   objective=%.8g alpha=%.8g drops=%lld\n",
                  static_cast<long long>(r.index), r.objective_final,
                  r.final_alpha, static_cast<long long>(r.n_drops));
    } else {
      ++failed;
      std::printf("point %04lld FAIL %s\n", static_cast<long long>(r.index),
                  r.error.c_str());
    }
  }
  std::printf("sweep complete: %zu points, %zu failed; table at %s/sweep.csv\n",
              results.size(), failed, out_dir.c_str());
  return failed == 0 ? 0 : 2;
}

int cmd_plot_data(const std::string& run_dir) {
  salsa::emit_plot_data(run_dir);
  std::printf("plot tables written under %s/plots\n", run_dir.c_str());
  return 0;
}

bool report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : ": ", detail.c_str());
  return ok;
}

int cmd_check(const std::string& run_dir) {
  if (!run_dir.empty()) {
    const auto err = salsa::validate_run_dir(run_dir);
    if (report("run-dir replay", !err.has_value(), err.value_or("")))
      return 0;
    return 2;
  }

  bool all = true;
  {
    salsa::ProblemSpec spec;
    spec.kind = "noisy_quadratic";
    spec.lambda = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    spec.x_star = salsa::zeros(10);
    spec.x0 = salsa::Vec(10, 2.0);
    spec.sigma = 0.5;
    spec.steps_per_epoch = 1000;
    const auto prob = spec.make();
    const auto chain = salsa::collect_shb_chain(*prob, spec.x0, 0.9, 0.05,
                                                0, 400, 7, 400);
    const auto rep = salsa::verify_shb_identity(chain.xs, chain.ds, 0.05, 0.9);
    all &= report("heavy-ball identity residual",
                  rep.relative_residual < 1e-9,
                  "relative residual " + salsa::fmt_g17(rep.relative_residual));
  }
  {
    salsa::ProblemSpec spec;
    spec.kind = "noisy_quadratic";
    spec.lambda = {1.0};
    spec.x_star = {0.0};
    spec.x0 = {0.0};
    spec.sigma = 1.0;
    spec.steps_per_epoch = 1000;
    const auto prob = spec.make();
    const auto chain =
        salsa::collect_shb_chain(*prob, spec.x0, 0.9, 0.1, 10000, 200000, 11);
    const auto rep =
        salsa::stationary_means_report(chain.deltas, chain.yaidas, chain.dsqs);
    all &= report("stationary means (Delta, Yaida, ||d||^2 drift)",
                  rep.within(3.0),
                  "Delta mean " + salsa::fmt_g17(rep.delta_mean) + " (se " +
                      salsa::fmt_g17(rep.delta_se) + ")");
  }
  {
    const double q1 = salsa::t_quantile(0.975, 1);
    const double q2 = salsa::t_quantile(0.975, 1000000);
    const bool ok =
        std::fabs(q1 - 12.706204736174698) < 1e-6 && std::fabs(q2 - 1.959964) < 1e-4;
    all &= report("t quantiles", ok,
                  "t(0.975,1)=" + salsa::fmt_g17(q1) + ", t(0.975,1e6)=" +
                      salsa::fmt_g17(q2));
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "salsa_opt: statistical step-size adaptation for stochastic "
      "optimization"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "run_out", run_dir;
  std::vector<std::string> overrides;
  long long seed = 0;
  int threads = 0;

  auto* run = app.add_subcommand("run", "execute one configured run");
  run->add_option("--config", config_path, "run config JSON")->required();
  run->add_option("--override", overrides,
                  "dotted.path=value override (repeatable)");
  run->add_option("--out", out_dir, "output directory (default run_out)");
  auto* seed_opt = run->add_option("--seed", seed, "override the RNG seed");

  std::string sweep_config, sweep_out = "sweep_out";
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--override", overrides,
                    "dotted.path=value override applied to the base config");
  sweep->add_option("--out", sweep_out, "output directory (default sweep_out)");
  sweep->add_option("--threads", threads,
                    "parallel runs (default: SALSA_OPT_THREADS or hardware)");

  auto* plot = app.add_subcommand("plot-data",
                                  "derive tidy plot tables from a run dir");
  plot->add_option("--run", run_dir, "run directory")->required();

  std::string check_run;
  auto* check = app.add_subcommand(
      "check", "self-diagnostics, or replay-validate a run dir with --run");
  check->add_option("--run", check_run, "run directory to validate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, overrides, out_dir, seed,
                     seed_opt->count() > 0);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, overrides, sweep_out, threads);
    if (plot->parsed()) return cmd_plot_data(run_dir);
    if (check->parsed()) return cmd_check(check_run);
  } catch (const salsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const salsa::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
