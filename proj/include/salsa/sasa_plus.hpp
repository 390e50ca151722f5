#pragma once

// SASA+: statistical adaptation of the step size. Every iteration appends
// the stationarity statistic Delta_k; at a fixed cadence the controller runs
// a t-test on the most recent N = ceil(theta * (k - k_anchor)) samples and,
// once the chain looks stationary, cuts the step size by a factor tau and
// starts a fresh window.

#include <cstdint>
#include <optional>
#include <vector>

#include "salsa/stats.hpp"
#include "salsa/vec.hpp"

namespace salsa {

struct SasaPlusConfig {
  std::int64_t n_min = 1000;   // minimum window before any test
  std::int64_t test_every = 100;  // test cadence in iterations (K_test)
  double delta = 0.05;         // significance level
  double theta = 0.125;        // fraction of the post-drop run kept in window
  double tau = 0.1;            // step-size cut factor
  EstimatorKind estimator = EstimatorKind::OLBM;

  // Dataset-aware defaults: N_min = min(1000, steps_per_epoch),
  // K_test = min(100, steps_per_epoch).
  static SasaPlusConfig defaults(std::int64_t steps_per_epoch);

  void validate() const;
};

// One accepted step-size cut.
struct ScheduleEvent {
  std::int64_t iteration = 0;
  double alpha_old = 0.0;
  double alpha_new = 0.0;
  TestVerdict verdict;
};

// Result of feeding one iteration to the controller.
struct ControllerStep {
  double alpha_next = 0.0;              // step size for the next iteration
  bool tested = false;                  // a test ran at this iteration
  TestVerdict verdict;                  // valid when tested
  std::optional<ScheduleEvent> event;   // set when the test fired a cut
  // Diagnostic variance estimates on the tested window (valid when tested),
  // recorded before any reset so all three estimators see the same data.
  double sigma_iid = 0.0;
  double sigma_bm = 0.0;
  double sigma_olbm = 0.0;
};

class SasaPlusController {
 public:
  explicit SasaPlusController(const SasaPlusConfig& cfg);

  // Feed iteration k (1-based count of completed steps): Delta_k computed
  // from the pre-update iterate, the direction just used, and the step size
  // alpha in force at k. Returns the step size to use from k+1 on, plus any
  // test outcome.
  ControllerStep observe(std::int64_t k, double delta_k, double alpha);

  // Start a fresh window anchored at k (used when another phase hands over).
  void restart(std::int64_t k);

  const SasaPlusConfig& config() const { return cfg_; }
  const SampleWindow& window() const { return window_; }

  // Window currently exposed at iteration k (for logging extra estimators).
  std::span<const double> exposed(std::int64_t k) const {
    return window_.exposed(k);
  }

 private:
  SasaPlusConfig cfg_;
  SampleWindow window_;
};

}  // namespace salsa
