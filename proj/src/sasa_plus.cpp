#include "salsa/sasa_plus.hpp"

#include <algorithm>
#include <string>

#include "salsa/errors.hpp"

namespace salsa {

SasaPlusConfig SasaPlusConfig::defaults(std::int64_t steps_per_epoch) {
  SasaPlusConfig cfg;
  if (steps_per_epoch < 1)
    throw ConfigError("SasaPlusConfig: steps_per_epoch must be >= 1");
  cfg.n_min = std::min<std::int64_t>(1000, steps_per_epoch);
  cfg.test_every = std::min<std::int64_t>(100, steps_per_epoch);
  return cfg;
}

void SasaPlusConfig::validate() const {
  if (n_min < 4)
    throw ConfigError("SasaPlusConfig: n_min must be >= 4, got " +
                      std::to_string(n_min));
  if (test_every < 1)
    throw ConfigError("SasaPlusConfig: test_every must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("SasaPlusConfig: delta must lie in (0, 1)");
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("SasaPlusConfig: theta must lie in (0, 1]");
  if (!(tau > 0.0 && tau < 1.0))
    throw ConfigError("SasaPlusConfig: tau must lie in (0, 1)");
}

SasaPlusController::SasaPlusController(const SasaPlusConfig& cfg)
    : cfg_(cfg), window_(cfg.theta) {
  cfg_.validate();
  window_.reset(0);
}

void SasaPlusController::restart(std::int64_t k) { window_.reset(k); }

ControllerStep SasaPlusController::observe(std::int64_t k, double delta_k,
                                           double alpha) {
  window_.append(delta_k, k);
  ControllerStep out;
  out.alpha_next = alpha;

  if (k % cfg_.test_every != 0) return out;
  const std::int64_t n = window_.exposed_count(k);
  if (n <= cfg_.n_min) return out;

  out.tested = true;
  const std::span<const double> w = window_.exposed(k);
  out.verdict = stationarity_test(w, cfg_.delta, cfg_.estimator);
  out.sigma_iid = variance_estimate(w, EstimatorKind::IID).sigma_sq;
  out.sigma_bm = variance_estimate(w, EstimatorKind::BM).sigma_sq;
  out.sigma_olbm = variance_estimate(w, EstimatorKind::OLBM).sigma_sq;
  if (out.verdict.decision == Decision::Stationary) {
    ScheduleEvent ev;
    ev.iteration = k;
    ev.alpha_old = alpha;
    ev.alpha_new = alpha * cfg_.tau;
    ev.verdict = out.verdict;
    out.event = ev;
    out.alpha_next = ev.alpha_new;
    window_.reset(k);
  }
  return out;
}

}  // namespace salsa
