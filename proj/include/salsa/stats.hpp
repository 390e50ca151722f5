#pragma once

// Statistics used by the stationarity diagnostics: the Delta statistic and
// its Yaida-form variant, confidence-interval machinery with iid / batch
// means (BM) / overlapping batch means (OLBM) variance estimators, Student-t
// quantiles, the stationarity t-test, the legacy equivalence test, and the
// linear-trend ("slope") test on recent losses. A SampleWindow implements
// the grow-with-the-run retention policy the controllers share.

#include <cstdint>
#include <span>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/vec.hpp"

namespace salsa {

// ---------------------------------------------------------------------------
// Test statistics
// ---------------------------------------------------------------------------

// Delta_k = <x, d> - (alpha/2) ||d||^2. At stationarity of the underlying
// Markov chain E[Delta] = 0 exactly, for every member of the QHM family.
double delta_statistic(const Vec& x, const Vec& d, double alpha);

// Heavy-ball-only variant written on the gradient sample:
//   <x, g> - (alpha/2) (1+beta)/(1-beta) ||d||^2.
// Requires beta < 1.
double yaida_delta(const Vec& x, const Vec& g, const Vec& d, double alpha,
                   double beta);

// ---------------------------------------------------------------------------
// Variance estimation
// ---------------------------------------------------------------------------

enum class EstimatorKind { IID, BM, OLBM };

const char* estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);  // ConfigError

struct VarianceEstimate {
  double sigma_sq = 0.0;  // estimate of the asymptotic variance of the mean,
                          // i.e. lim N Var(sample mean) for correlated data
  std::int64_t dof = 0;   // degrees of freedom for the matching t reference
};

// IID: classic sample variance, dof = N - 1. Requires N >= 2.
//
// BM: split into p = ceil(sqrt(N)) consecutive disjoint batches of length
// q = floor(N / p); when p*q < N the oldest samples are dropped so batches
// tile the most recent p*q. sigma^2 = q/(p-1) sum_j (mean_j - mean)^2,
// dof = p - 1. Requires N >= 4.
//
// OLBM: overlapping batches of length p = ceil(sqrt(N)),
//   sigma^2 = N p / ((N-p)(N-p+1)) * sum_{j=0}^{N-p} (mean - batchmean_j)^2,
// dof = N - p. Computed in O(N) with a sliding batch sum. Requires N >= 4.
//
// Short windows raise NotEnoughSamples.
VarianceEstimate variance_estimate(std::span<const double> z,
                                   EstimatorKind kind);

// ---------------------------------------------------------------------------
// Student-t quantiles
// ---------------------------------------------------------------------------

// Inverse CDF of Student's t with `dof` degrees of freedom, via the
// regularized incomplete beta function and bisection; the result is accurate
// to about 1e-9 in probability. dof >= 1, 0 < p < 1.
double t_quantile(double p, std::int64_t dof);

// CDF of Student's t (exposed for tests).
double t_cdf(double t, std::int64_t dof);

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

enum class Decision { Stationary, NotStationary, Decreasing, NotDecreasing };

const char* decision_name(Decision d);

// Outcome of one statistical test on a window of N samples. The decision is
// always equivalent to a comparison of `mean` against `half_width`:
//   stationarity / equivalence:  Stationary  iff  |mean| <= half_width (and,
//     for the equivalence test, the CI also fits inside the tolerance band)
//   slope:                       Decreasing  iff  mean < -half_width
// so a zero-variance window degenerates gracefully (half_width = 0).
struct TestVerdict {
  Decision decision = Decision::NotStationary;
  double mean = 0.0;        // sample mean (slope test: fitted slope c1)
  double half_width = 0.0;  // t-quantile * standard error
  double sigma_sq = 0.0;    // variance estimate behind the half width
  std::int64_t dof = 0;
  std::int64_t n_used = 0;
  double t_stat = 0.0;      // slope test: c1 / se (0 when se = 0)
  double equiv_bound = 0.0; // equivalence test: zeta * mean |nu|
};

// Two-sided t-test of H0: E[Delta] = 0 at level `delta` on the window.
// Stationary iff 0 lies inside mean +/- t_{1-delta/2, dof} * sigma / sqrt(N).
TestVerdict stationarity_test(std::span<const double> deltas, double delta,
                              EstimatorKind kind);

// Legacy equivalence test: declares stationarity only when the whole CI of
// the Delta mean lies inside [-zeta * vbar, +zeta * vbar] where vbar is the
// running mean of nu_k = (alpha/2) ||d_k||^2 (or any caller-chosen scale
// sequence). `nus` must be the same length as `deltas`.
TestVerdict sasa_equivalence_test(std::span<const double> deltas,
                                  std::span<const double> nus, double delta,
                                  double zeta, EstimatorKind kind);

// One-sided t-test for a negative linear trend in recent losses. Fits
// y_i ~ c0 + c1 * i by least squares; Decreasing iff
//   t = c1 / se(c1) < t_{delta, N-2},
// where se(c1)^2 = RSS / ((N-2) * Sxx). With a zero-variance fit the sign
// of c1 decides. Requires N >= 3 (NotEnoughSamples below).
TestVerdict slope_test(std::span<const double> losses, double delta);

// ---------------------------------------------------------------------------
// Sample window
// ---------------------------------------------------------------------------

// Append-per-iteration buffer that exposes the most recent
//   N(k) = ceil(theta * (k - k_anchor))
// samples, where k_anchor is the iteration of the last reset. Storage is
// trimmed lazily and hard-capped; the exposed count never exceeds what has
// been appended since the reset.
class SampleWindow {
 public:
  explicit SampleWindow(double theta, std::size_t capacity = 1000000);

  void reset(std::int64_t k_anchor);
  void append(double value, std::int64_t k);  // k must increase monotonically

  std::int64_t exposed_count(std::int64_t k) const;
  std::span<const double> exposed(std::int64_t k) const;

  std::int64_t anchor() const { return k_anchor_; }
  std::int64_t appended_since_reset() const { return appended_; }
  double theta() const { return theta_; }

 private:
  void trim(std::size_t keep);

  double theta_;
  std::size_t capacity_;
  std::int64_t k_anchor_ = 0;
  std::int64_t k_last_ = 0;
  std::int64_t appended_ = 0;
  std::vector<double> buf_;
};

}  // namespace salsa
