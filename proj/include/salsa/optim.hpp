#pragma once

// Quasi-hyperbolic momentum (QHM) direction family and the plain SGD-style
// parameter update. QHM spans the classical first-order methods with two
// scalars (beta, nu):
//
//   h_k = (1 - beta) g_k + beta h_{k-1}        (momentum buffer)
//   d_k = (1 - nu)  g_k + nu   h_k             (update direction)
//   x_{k+1} = x_k - alpha d_k
//
//   nu = 0 (or beta = 0)  ->  SGD          (d = g)
//   nu = 1                ->  heavy ball   (d = h)
//   nu = beta             ->  Nesterov     (up to a step-size rescale; see
//                                           nag_direction for the direct form)
//
// Buffers start at zero, which makes early directions biased low; nothing
// here corrects for that, matching common practice.

#include <cstdint>
#include <functional>

#include "salsa/errors.hpp"
#include "salsa/vec.hpp"

namespace salsa {

struct DirectionRule {
  double beta = 0.0;  // momentum decay, 0 <= beta < 1
  double nu = 0.0;    // momentum weight in the direction, 0 <= nu <= 1

  static DirectionRule sgd() { return {0.0, 0.0}; }
  static DirectionRule shb(double beta) { return {beta, 1.0}; }
  static DirectionRule nag(double beta) { return {beta, beta}; }
  static DirectionRule qhm(double beta, double nu) { return {beta, nu}; }

  void validate() const {
    if (!(beta >= 0.0 && beta < 1.0))
      throw ConfigError("DirectionRule: beta must satisfy 0 <= beta < 1, got " +
                        std::to_string(beta));
    if (!(nu >= 0.0 && nu <= 1.0))
      throw ConfigError("DirectionRule: nu must satisfy 0 <= nu <= 1, got " +
                        std::to_string(nu));
  }
};

// One optimizer state: iterate, momentum buffer, last direction, step size,
// and the iteration counter.
struct IterateState {
  Vec x;
  Vec h;  // momentum buffer, zero-initialized
  Vec d;  // direction used by the most recent step, zero-initialized
  double alpha = 0.0;
  std::int64_t k = 0;

  static IterateState init(Vec x0, double alpha0) {
    IterateState s;
    s.h = zeros(x0.size());
    s.d = zeros(x0.size());
    s.x = std::move(x0);
    s.alpha = alpha0;
    s.k = 0;
    return s;
  }
};

// Updates the momentum buffer and direction in place from a fresh stochastic
// gradient. h and d may alias state buffers; g must not alias either.
inline void qhm_direction(const DirectionRule& rule, const Vec& g, Vec& h,
                          Vec& d) {
  rule.validate();
  require_same_dim(g, h, "qhm_direction");
  require_same_dim(g, d, "qhm_direction");
  const double beta = rule.beta;
  const double nu = rule.nu;
  for (std::size_t i = 0; i < g.size(); ++i) {
    h[i] = (1.0 - beta) * g[i] + beta * h[i];
    d[i] = (1.0 - nu) * g[i] + nu * h[i];
  }
}

// x <- x - alpha * d; k <- k + 1. Buffers h and d are carried in the state.
inline void apply_step(IterateState& s, const Vec& d, double alpha) {
  require_same_dim(s.x, d, "apply_step");
  for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] -= alpha * d[i];
  s.k += 1;
}

// Direct Nesterov direction: the gradient is sampled at the lookahead point
// x - alpha*beta*d_prev using the same minibatch/noise draw, then combined
// with the previous direction:
//
//   d_k = g(x_k - alpha beta d_{k-1}) + beta d_{k-1}
//
// Note this buffer is unnormalized (no 1-beta factor), so direct NAG at step
// size alpha matches QHM(beta, nu=beta) dynamics at step size alpha/(1-beta);
// see the optimizer tests for the exact correspondence.
inline Vec nag_direction(double beta, const Vec& x, const Vec& d_prev,
                         double alpha,
                         const std::function<void(const Vec&, Vec&)>& grad_at) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ConfigError("nag_direction: beta must satisfy 0 <= beta < 1");
  require_same_dim(x, d_prev, "nag_direction");
  Vec lookahead = x;
  axpy(-alpha * beta, d_prev, lookahead);
  Vec d(x.size(), 0.0);
  grad_at(lookahead, d);
  axpy(beta, d_prev, d);
  return d;
}

}  // namespace salsa
