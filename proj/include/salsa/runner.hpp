#pragma once

// The experiment loop. One driver serves every scheduler; each iteration
// draws a minibatch/noise sample, evaluates loss and gradient at the
// current iterate, forms the QHM direction, (in warmup) runs the line-search
// probe, takes the step, and feeds the statistics to the active controller.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "salsa/run_config.hpp"
#include "salsa/salsa_controller.hpp"
#include "salsa/sasa_plus.hpp"
#include "salsa/stats.hpp"
#include "salsa/vec.hpp"

namespace salsa {

struct MetricRow {
  std::int64_t iteration = 0;
  double epoch = 0.0;
  double loss = 0.0;
  double loss_smooth = 0.0;
  double alpha = 0.0;  // step size used at this iteration
  std::string phase;   // warmup | adaptive
  int ls_evals = 0;    // extra loss evaluations spent by the probe

  bool has_delta_test = false;
  TestVerdict delta_verdict;
  double sigma_iid = 0.0, sigma_bm = 0.0, sigma_olbm = 0.0;
  bool has_slope_test = false;
  TestVerdict slope_verdict;
};

struct TestLogEntry {
  std::int64_t iteration = 0;
  bool is_slope = false;
  TestVerdict verdict;
  double sigma_iid = 0.0, sigma_bm = 0.0, sigma_olbm = 0.0;  // delta tests
  double alpha = 0.0;
  std::string phase;
};

struct DropLogEntry {
  ScheduleEvent event;
  std::string source;  // sasa | slope | fixed_schedule
};

struct RunResult {
  ResolvedConfig cfg;

  std::vector<MetricRow> rows;
  std::vector<TestLogEntry> tests;
  std::vector<DropLogEntry> drops;
  std::optional<SwitchEvent> switch_event;
  std::vector<double> alpha_trace;  // alpha used at every iteration, 1..T

  Vec x_final;
  Vec x_avg_last_epoch;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  double objective_avg = 0.0;
  double final_loss = 0.0;
  double final_loss_smooth = 0.0;
  double final_alpha = 0.0;
  std::int64_t switch_iteration = -1;
  int max_ls_evals_warmup = 0;
  int max_ls_evals_adaptive = 0;
  double wall_seconds = 0.0;
};

RunResult run_experiment(const ResolvedConfig& cfg);

// Convenience wrappers used by tests and the check verb.
RunResult run_sasa_plus(const ProblemSpec& problem, const DirectionRule& rule,
                        const SasaPlusConfig& sasa, double alpha0,
                        std::int64_t total_iters, std::uint64_t seed);
RunResult run_salsa(const ProblemSpec& problem, const DirectionRule& rule,
                    const SalsaConfig& salsa, double alpha0,
                    std::int64_t total_iters, std::uint64_t seed);

}  // namespace salsa
