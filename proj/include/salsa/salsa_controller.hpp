#pragma once

// SALSA: warmup with the smoothed line search (SSLS) until training looks
// converged, then hand the step size to SASA+. Two statistical triggers end
// the warmup, checked at the SASA+ cadence on windows anchored at the start
// of the run:
//   x-stationarity: the SASA+ t-test on the Delta statistics, and
//   f-stationarity: the slope test on recent minibatch losses reporting
//                   NotDecreasing.
// Either one switches phases (once, permanently). The switch seeds SASA+
// with the current smoothed step size and a fresh window; warmup samples
// are discarded and the slope test is never consulted again.

#include <cstdint>
#include <optional>

#include "salsa/sasa_plus.hpp"
#include "salsa/ssls.hpp"
#include "salsa/stats.hpp"

namespace salsa {

enum class Phase { Warmup, Adaptive };

const char* phase_name(Phase p);

struct SalsaConfig {
  SslsConfig ssls;
  SasaPlusConfig sasa;
  bool slope_enabled = true;

  void validate() const {
    ssls.validate();
    sasa.validate();
  }
};

struct SwitchEvent {
  std::int64_t iteration = 0;
  double alpha = 0.0;        // step size handed to SASA+
  bool x_stationary = false;
  bool f_stationary = false;
  TestVerdict delta_verdict;
  TestVerdict slope_verdict;  // meaningful only when slope_enabled
};

struct SalsaStep {
  double alpha_next = 0.0;
  bool tested = false;              // a Delta test ran here
  TestVerdict delta_verdict;        // valid when tested
  bool slope_tested = false;
  TestVerdict slope_verdict;        // valid when slope_tested
  std::optional<SwitchEvent> switched;
  std::optional<ScheduleEvent> drop;  // SASA+ cut (adaptive phase only)
  double sigma_iid = 0.0;   // Delta-window diagnostics, valid when tested
  double sigma_bm = 0.0;
  double sigma_olbm = 0.0;
};

class SalsaController {
 public:
  explicit SalsaController(const SalsaConfig& cfg);

  Phase phase() const { return phase_; }
  const SalsaConfig& config() const { return cfg_; }

  // Feed iteration k (1-based). During warmup the caller performed an SSLS
  // step and passes the minibatch loss at the pre-step iterate along with
  // Delta_k and the step size used; in the adaptive phase loss_k is only
  // logged by the caller and Delta drives SASA+.
  SalsaStep observe(std::int64_t k, double delta_k, double loss_k,
                    double alpha);

  // Window exposed by the active Delta monitor (for logging).
  std::span<const double> exposed_deltas(std::int64_t k) const;

 private:
  SalsaConfig cfg_;
  Phase phase_ = Phase::Warmup;
  SampleWindow warmup_deltas_;
  SampleWindow warmup_losses_;
  SasaPlusController sasa_;
};

}  // namespace salsa
