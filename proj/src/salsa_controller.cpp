#include "salsa/salsa_controller.hpp"

namespace salsa {

const char* phase_name(Phase p) {
  return p == Phase::Warmup ? "warmup" : "adaptive";
}

SalsaController::SalsaController(const SalsaConfig& cfg)
    : cfg_(cfg),
      warmup_deltas_(cfg.sasa.theta),
      warmup_losses_(cfg.sasa.theta),
      sasa_(cfg.sasa) {
  cfg_.validate();
  warmup_deltas_.reset(0);
  warmup_losses_.reset(0);
}

std::span<const double> SalsaController::exposed_deltas(std::int64_t k) const {
  if (phase_ == Phase::Warmup) return warmup_deltas_.exposed(k);
  return sasa_.exposed(k);
}

SalsaStep SalsaController::observe(std::int64_t k, double delta_k,
                                   double loss_k, double alpha) {
  SalsaStep out;
  out.alpha_next = alpha;

  if (phase_ == Phase::Adaptive) {
    const ControllerStep step = sasa_.observe(k, delta_k, alpha);
    out.alpha_next = step.alpha_next;
    out.tested = step.tested;
    out.delta_verdict = step.verdict;
    out.drop = step.event;
    out.sigma_iid = step.sigma_iid;
    out.sigma_bm = step.sigma_bm;
    out.sigma_olbm = step.sigma_olbm;
    return out;
  }

  warmup_deltas_.append(delta_k, k);
  warmup_losses_.append(loss_k, k);
  if (k % cfg_.sasa.test_every != 0) return out;
  const std::int64_t n = warmup_deltas_.exposed_count(k);
  if (n <= cfg_.sasa.n_min) return out;

  out.tested = true;
  const std::span<const double> w = warmup_deltas_.exposed(k);
  out.delta_verdict = stationarity_test(w, cfg_.sasa.delta,
                                        cfg_.sasa.estimator);
  out.sigma_iid = variance_estimate(w, EstimatorKind::IID).sigma_sq;
  out.sigma_bm = variance_estimate(w, EstimatorKind::BM).sigma_sq;
  out.sigma_olbm = variance_estimate(w, EstimatorKind::OLBM).sigma_sq;
  const bool x_stat = out.delta_verdict.decision == Decision::Stationary;
  bool f_stat = false;
  if (cfg_.slope_enabled) {
    out.slope_tested = true;
    out.slope_verdict =
        slope_test(warmup_losses_.exposed(k), cfg_.sasa.delta);
    f_stat = out.slope_verdict.decision == Decision::NotDecreasing;
  }
  if (x_stat || f_stat) {
    phase_ = Phase::Adaptive;
    sasa_.restart(k);  // fresh window; warmup samples are discarded
    SwitchEvent ev;
    ev.iteration = k;
    ev.alpha = alpha;
    ev.x_stationary = x_stat;
    ev.f_stationary = f_stat;
    ev.delta_verdict = out.delta_verdict;
    ev.slope_verdict = out.slope_verdict;
    out.switched = ev;
  }
  return out;
}

}  // namespace salsa
