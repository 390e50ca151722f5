#pragma once

// Self-diagnostics. Two families:
//
//  1. An exact per-iterate telescoping identity for heavy ball: with
//     d_k = (1-beta) g_k + beta d_{k-1} and x_{k+1} = x_k - alpha d_k,
//
//       <x_k, g_k> - (alpha/2) (1+beta)/(1-beta) ||d_k||^2
//         = ( A_k - A_{k-1} ) / ( 2 alpha (1-beta) ),
//       A_k = beta ||x_k||^2 - ||x_{k+1}||^2 - alpha^2 beta ||d_k||^2,
//
//     which must hold to rounding error on any recorded trajectory. This
//     pins the statistic plumbing: any indexing or scaling slip shows up
//     as a non-vanishing residual.
//
//  2. A Monte-Carlo check that both stationarity statistics (the Delta
//     form and the Yaida form) and the momentum-magnitude drift all have
//     mean zero once the chain reaches its stationary distribution.

#include <cstdint>
#include <span>
#include <vector>

#include "salsa/problems.hpp"
#include "salsa/stats.hpp"
#include "salsa/vec.hpp"

namespace salsa {

struct IdentityReport {
  double max_abs_residual = 0.0;
  double max_abs_lhs = 0.0;
  // max |lhs - rhs| / (1 + max |lhs|): dimensionless, ~1e-15 when correct.
  double relative_residual = 0.0;
  std::int64_t terms = 0;
};

// xs = [x_0 ... x_T], ds = [d_0 ... d_{T-1}] from a heavy-ball run with
// constant alpha, beta. Gradients are reconstructed from the buffer
// recursion g_k = (d_k - beta d_{k-1}) / (1 - beta); residuals are checked
// for k = 1 .. T-1.
IdentityReport verify_shb_identity(const std::vector<Vec>& xs,
                                   const std::vector<Vec>& ds, double alpha,
                                   double beta);

// Scalar traces from a heavy-ball chain.
struct ChainStats {
  std::vector<double> deltas;  // <x,d> - (alpha/2)||d||^2
  std::vector<double> yaidas;  // <x,g> - (alpha/2)(1+beta)/(1-beta)||d||^2
  std::vector<double> dsqs;    // ||d||^2
  std::vector<Vec> xs;         // optional short trajectory (see keep)
  std::vector<Vec> ds;
};

// Runs heavy ball with constant step on `prob`, discards `burnin` steps,
// then records `samples` iterations of the three scalar statistics. When
// keep_trajectory > 0 the first that many (x, d) pairs of the recording
// phase are kept for the identity check.
ChainStats collect_shb_chain(const StochasticProblem& prob, const Vec& x0,
                             double beta, double alpha, std::int64_t burnin,
                             std::int64_t samples, std::uint64_t seed,
                             std::int64_t keep_trajectory = 0);

struct StationaryMeansReport {
  double delta_mean = 0.0, delta_se = 0.0;
  double yaida_mean = 0.0, yaida_se = 0.0;
  double dsq_diff_mean = 0.0, dsq_diff_se = 0.0;
  std::int64_t n = 0;

  bool within(double z) const;  // all three means within z standard errors
};

// Standard errors use the OLBM asymptotic-variance estimate, so the check
// is honest about the autocorrelation of the chain.
StationaryMeansReport stationary_means_report(std::span<const double> deltas,
                                std::span<const double> yaidas,
                                std::span<const double> dsqs);

}  // namespace salsa
