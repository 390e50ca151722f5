#include "salsa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace salsa {

// ---------------------------------------------------------------------------
// Test statistics
// ---------------------------------------------------------------------------

double delta_statistic(const Vec& x, const Vec& d, double alpha) {
  require_same_dim(x, d, "delta_statistic");
  return dot(x, d) - 0.5 * alpha * norm_sq(d);
}

double yaida_delta(const Vec& x, const Vec& g, const Vec& d, double alpha,
                   double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ConfigError("yaida_delta: beta must satisfy 0 <= beta < 1, got " +
                      std::to_string(beta));
  require_same_dim(x, g, "yaida_delta");
  require_same_dim(x, d, "yaida_delta");
  const double ratio = (1.0 + beta) / (1.0 - beta);
  return dot(x, g) - 0.5 * alpha * ratio * norm_sq(d);
}

// ---------------------------------------------------------------------------
// Variance estimation
// ---------------------------------------------------------------------------

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::IID: return "iid";
    case EstimatorKind::BM: return "bm";
    case EstimatorKind::OLBM: return "olbm";
  }
  return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "iid") return EstimatorKind::IID;
  if (name == "bm") return EstimatorKind::BM;
  if (name == "olbm") return EstimatorKind::OLBM;
  throw ConfigError("unknown variance estimator '" + name +
                    "' (expected iid, bm, or olbm)");
}

namespace {

double mean_of(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v;
  return s / static_cast<double>(z.size());
}

VarianceEstimate iid_estimate(std::span<const double> z) {
  const auto n = static_cast<std::int64_t>(z.size());
  if (n < 2) throw NotEnoughSamples("iid variance needs N >= 2");
  const double m = mean_of(z);
  double ss = 0.0;
  for (double v : z) ss += (v - m) * (v - m);
  return {ss / static_cast<double>(n - 1), n - 1};
}

VarianceEstimate bm_estimate(std::span<const double> z) {
  const auto n = static_cast<std::int64_t>(z.size());
  if (n < 4) throw NotEnoughSamples("batch means needs N >= 4");
  const auto p = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  const std::int64_t q = n / p;
  const std::int64_t used = p * q;
  // Drop the oldest n - used samples so the batches tile the newest part
  // of the window.
  std::span<const double> zz = z.subspan(static_cast<std::size_t>(n - used));
  const double grand = mean_of(zz);
  double ss = 0.0;
  for (std::int64_t j = 0; j < p; ++j) {
    double bs = 0.0;
    for (std::int64_t i = 0; i < q; ++i)
      bs += zz[static_cast<std::size_t>(j * q + i)];
    const double bm = bs / static_cast<double>(q);
    ss += (bm - grand) * (bm - grand);
  }
  const double sigma_sq =
      static_cast<double>(q) / static_cast<double>(p - 1) * ss;
  return {sigma_sq, p - 1};
}

VarianceEstimate olbm_estimate(std::span<const double> z) {
  const auto n = static_cast<std::int64_t>(z.size());
  if (n < 4) throw NotEnoughSamples("overlapping batch means needs N >= 4");
  const auto p = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  const double zbar = mean_of(z);
  // Sliding sum over all n - p + 1 overlapping batches of length p.
  double wsum = 0.0;
  for (std::int64_t i = 0; i < p; ++i) wsum += z[static_cast<std::size_t>(i)];
  double ss = 0.0;
  const double inv_p = 1.0 / static_cast<double>(p);
  for (std::int64_t j = 0;; ++j) {
    const double diff = zbar - wsum * inv_p;
    ss += diff * diff;
    if (j == n - p) break;
    wsum += z[static_cast<std::size_t>(j + p)] - z[static_cast<std::size_t>(j)];
  }
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  const double sigma_sq = nn * pp / ((nn - pp) * (nn - pp + 1.0)) * ss;
  return {sigma_sq, n - p};
}

}  // namespace

VarianceEstimate variance_estimate(std::span<const double> z,
                                   EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::IID: return iid_estimate(z);
    case EstimatorKind::BM: return bm_estimate(z);
    case EstimatorKind::OLBM: return olbm_estimate(z);
  }
  throw ConfigError("variance_estimate: bad estimator kind");
}

// ---------------------------------------------------------------------------
// Student-t quantiles via the regularized incomplete beta function
// ---------------------------------------------------------------------------

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
// The iteration cap is generous because convergence slows near x = 1 with a
// large first parameter, which is exactly the regime of t CDFs at huge dof;
// a few thousand terms suffice for dof up to 1e7.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 60000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return h;
}

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double t_cdf(double t, std::int64_t dof) {
  if (dof < 1) throw ConfigError("t_cdf: dof must be >= 1");
  if (t == 0.0) return 0.5;
  const double nu = static_cast<double>(dof);
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, std::int64_t dof) {
  if (dof < 1) throw ConfigError("t_quantile: dof must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("t_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, dof);

  // Bracket the root, then bisect. The CDF is monotone, so bisection is
  // globally safe; ~60 halvings reach full double precision from any
  // reasonable bracket.
  double lo = 0.0;
  double hi = 1.0;
  while (t_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = t_cdf(mid, dof);
    if (f < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * (1.0 + std::fabs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Stationary: return "stationary";
    case Decision::NotStationary: return "not_stationary";
    case Decision::Decreasing: return "decreasing";
    case Decision::NotDecreasing: return "not_decreasing";
  }
  return "?";
}

namespace {

void check_level(double delta, const char* where) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError(std::string(where) +
                      ": significance level must lie in (0, 1), got " +
                      std::to_string(delta));
}

}  // namespace

TestVerdict stationarity_test(std::span<const double> deltas, double delta,
                              EstimatorKind kind) {
  check_level(delta, "stationarity_test");
  const VarianceEstimate est = variance_estimate(deltas, kind);
  const auto n = static_cast<std::int64_t>(deltas.size());
  TestVerdict v;
  v.mean = mean_of(deltas);
  v.sigma_sq = est.sigma_sq;
  v.dof = est.dof;
  v.n_used = n;
  const double se = std::sqrt(est.sigma_sq / static_cast<double>(n));
  v.half_width = t_quantile(1.0 - 0.5 * delta, est.dof) * se;
  v.decision = (std::fabs(v.mean) <= v.half_width) ? Decision::Stationary
                                                   : Decision::NotStationary;
  return v;
}

TestVerdict sasa_equivalence_test(std::span<const double> deltas,
                                  std::span<const double> nus, double delta,
                                  double zeta, EstimatorKind kind) {
  check_level(delta, "sasa_equivalence_test");
  if (!(zeta > 0.0))
    throw ConfigError("sasa_equivalence_test: zeta must be positive");
  if (deltas.size() != nus.size())
    throw DimensionError("sasa_equivalence_test: deltas and nus differ in length");
  TestVerdict v = stationarity_test(deltas, delta, kind);
  v.equiv_bound = zeta * mean_of(nus);
  const bool inside = (v.mean - v.half_width >= -v.equiv_bound) &&
                      (v.mean + v.half_width <= v.equiv_bound);
  v.decision = inside ? Decision::Stationary : Decision::NotStationary;
  return v;
}

TestVerdict slope_test(std::span<const double> losses, double delta) {
  check_level(delta, "slope_test");
  const auto n = static_cast<std::int64_t>(losses.size());
  if (n < 3) throw NotEnoughSamples("slope_test needs N >= 3");
  const double nn = static_cast<double>(n);
  const double ibar = 0.5 * (nn - 1.0);
  const double ybar = mean_of(losses);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - ibar;
    sxx += dx * dx;
    sxy += dx * (losses[static_cast<std::size_t>(i)] - ybar);
  }
  const double c1 = sxy / sxx;
  const double c0 = ybar - c1 * ibar;
  double rss = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double r =
        losses[static_cast<std::size_t>(i)] - c0 - c1 * static_cast<double>(i);
    rss += r * r;
  }
  const std::int64_t dof = n - 2;
  const double se_sq = rss / (static_cast<double>(dof) * sxx);
  const double se = std::sqrt(se_sq);
  const double tcrit = t_quantile(delta, dof);  // negative for delta < 0.5

  TestVerdict v;
  v.mean = c1;
  v.sigma_sq = se_sq;
  v.dof = dof;
  v.n_used = n;
  v.half_width = -tcrit * se;
  if (se > 0.0) {
    v.t_stat = c1 / se;
    v.decision =
        (v.t_stat < tcrit) ? Decision::Decreasing : Decision::NotDecreasing;
  } else {
    // Degenerate exact fit: the sign of the slope decides.
    v.t_stat = 0.0;
    v.decision = (c1 < 0.0) ? Decision::Decreasing : Decision::NotDecreasing;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sample window
// ---------------------------------------------------------------------------

SampleWindow::SampleWindow(double theta, std::size_t capacity)
    : theta_(theta), capacity_(capacity) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("SampleWindow: theta must lie in (0, 1], got " +
                      std::to_string(theta));
  if (capacity < 4) throw ConfigError("SampleWindow: capacity must be >= 4");
}

void SampleWindow::reset(std::int64_t k_anchor) {
  buf_.clear();
  k_anchor_ = k_anchor;
  k_last_ = k_anchor;
  appended_ = 0;
}

void SampleWindow::append(double value, std::int64_t k) {
  if (k <= k_last_)
    throw ConfigError("SampleWindow::append: iteration must increase (got " +
                      std::to_string(k) + " after " + std::to_string(k_last_) +
                      ")");
  buf_.push_back(value);
  appended_ += 1;
  k_last_ = k;
  const auto needed = static_cast<std::size_t>(exposed_count(k));
  // Amortized front trim: drop the prefix once it is as large as what we
  // must retain, and never hold more than the hard capacity.
  if (buf_.size() > capacity_ || buf_.size() > 2 * needed + 16) {
    trim(std::max<std::size_t>(needed, 1));
  }
}

void SampleWindow::trim(std::size_t keep) {
  keep = std::min({keep, buf_.size(), capacity_});
  if (buf_.size() > keep)
    buf_.erase(buf_.begin(),
               buf_.end() - static_cast<std::ptrdiff_t>(keep));
}

std::int64_t SampleWindow::exposed_count(std::int64_t k) const {
  if (k <= k_anchor_) return 0;
  const double raw = theta_ * static_cast<double>(k - k_anchor_);
  auto n = static_cast<std::int64_t>(std::ceil(raw));
  n = std::min(n, appended_);
  n = std::min(n, static_cast<std::int64_t>(buf_.size()));
  n = std::min(n, static_cast<std::int64_t>(capacity_));
  return std::max<std::int64_t>(n, 0);
}

std::span<const double> SampleWindow::exposed(std::int64_t k) const {
  const auto n = static_cast<std::size_t>(exposed_count(k));
  return std::span<const double>(buf_.data() + (buf_.size() - n), n);
}

}  // namespace salsa
