#pragma once

// Smoothed stochastic line search (warmup step-size estimation). Each
// iteration probes a sufficient-decrease (Armijo) condition on the current
// minibatch, starting optimistically from rho_inc * alpha and backtracking
// at most m times, then folds the probe result into the running step size
// with a small smoothing weight gamma:
//
//   eta <- rho_inc * alpha
//   repeat up to m times: accept if f(x - eta g) < f(x) - c eta ||g||^2,
//                         else eta <- rho_dec * eta   (also after the last
//                         failed try, so the returned eta is always the
//                         last *tested* candidate scaled down once)
//   alpha <- (1 - gamma) alpha + gamma eta
//
// The per-step change of alpha is therefore bracketed inside
//   [1 - gamma + gamma rho_dec^m rho_inc,  1 - gamma + gamma rho_inc].

#include <cmath>
#include <cstdint>
#include <functional>

#include "salsa/errors.hpp"
#include "salsa/vec.hpp"

namespace salsa {

struct SslsConfig {
  double c = 0.05;        // sufficient-decrease coefficient
  double rho_inc = 2.0;   // optimistic growth factor
  double rho_dec = 0.5;   // backtracking factor
  int max_tries = 2;      // m
  double gamma = 0.1;     // smoothing weight for the step-size average
  bool probe_along_direction = false;  // probe along d instead of g

  // gamma = sqrt(b/n); the other fields keep their standard values.
  static SslsConfig defaults(std::int64_t n, std::int64_t b);

  void validate() const;

  // Multiplicative bracket for one smoothed update of alpha.
  double min_step_ratio() const {
    return 1.0 - gamma + gamma * std::pow(rho_dec, max_tries) * rho_inc;
  }
  double max_step_ratio() const { return 1.0 - gamma + gamma * rho_inc; }
};

struct ArmijoResult {
  double eta = 0.0;   // chosen trial step
  int evals = 0;      // loss evaluations spent on probes (excludes f(x))
  bool accepted = false;  // a probe met the decrease condition
};

// Runs the backtracking probe. `loss_at` evaluates the minibatch loss at a
// trial point using the same sample that produced f_x and g; `probe_dir` is
// the direction scanned (the gradient by default). alpha_prev seeds the
// first trial at rho_inc * alpha_prev.
ArmijoResult armijo_probe(const std::function<double(const Vec&)>& loss_at,
                          const Vec& x, const Vec& probe_dir, double f_x,
                          double alpha_prev, const SslsConfig& cfg);

// Smoothed fold of the probe result into the running step size.
inline double smooth_alpha(double alpha_prev, double eta, double gamma) {
  return (1.0 - gamma) * alpha_prev + gamma * eta;
}

// Worst-case growth of alpha over `steps` iterations (every probe accepted
// at the optimistic trial): (1 - gamma + gamma rho_inc)^steps.
double ssls_epoch_growth_bound(const SslsConfig& cfg, std::int64_t steps);

}  // namespace salsa
