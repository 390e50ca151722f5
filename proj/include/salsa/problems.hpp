#pragma once

// Test problems with controllable noise. Both problems expose the same
// interface: draw a noise sample / minibatch, then evaluate a loss and a
// gradient that are deterministic functions of (sample, point), unbiased
// for the true objective F and its gradient.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/rng.hpp"
#include "salsa/vec.hpp"

namespace salsa {

// One stochastic draw: minibatch indices for dataset problems, a Gaussian
// noise vector for synthetic ones. Reused across calls to avoid churn.
struct Sample {
  std::vector<std::int64_t> idx;
  Vec noise;
};

class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual std::size_t dim() const = 0;
  // Number of examples; 0 for synthetic problems with no dataset.
  virtual std::int64_t dataset_size() const { return 0; }
  virtual std::int64_t batch_size() const { return 1; }
  // Iterations per "epoch" for schedules and defaults: ceil(n/b) for dataset
  // problems, a configured constant for synthetic ones.
  virtual std::int64_t steps_per_epoch() const = 0;

  virtual void draw(Rng& rng, Sample& s) const = 0;
  virtual double loss(const Sample& s, const Vec& x) const = 0;
  virtual void gradient(const Sample& s, const Vec& x, Vec& g) const = 0;

  // Deterministic objective F(x) (full-data / noise-free), used for
  // reporting and baselines.
  virtual double objective(const Vec& x) const = 0;
};

// ---------------------------------------------------------------------------
// Minibatch sampling
// ---------------------------------------------------------------------------

// Draws b indices uniformly without replacement from {0, ..., n-1} (Floyd's
// algorithm), independently across calls (i.e. with replacement across
// iterations). The result is sorted ascending for determinism. b > n is a
// configuration error.
void sample_minibatch(Rng& rng, std::int64_t n, std::int64_t b,
                      std::vector<std::int64_t>& out);

// ---------------------------------------------------------------------------
// Noisy quadratic
// ---------------------------------------------------------------------------

//   F(x) = 1/2 sum_i lambda_i (x_i - xstar_i)^2
// with additive Gaussian gradient noise: g(x) = grad F(x) + sigma * xi,
// xi ~ N(0, I). The matching loss sample is
//   f_xi(x) = F(x) + sigma <xi, x - xstar>
// so that grad f_xi = g and E f_xi = F.
class NoisyQuadratic final : public StochasticProblem {
 public:
  NoisyQuadratic(Vec lambda, Vec x_star, double sigma,
                 std::int64_t steps_per_epoch);

  std::size_t dim() const override { return lambda_.size(); }
  std::int64_t steps_per_epoch() const override { return steps_per_epoch_; }

  void draw(Rng& rng, Sample& s) const override;
  double loss(const Sample& s, const Vec& x) const override;
  void gradient(const Sample& s, const Vec& x, Vec& g) const override;
  double objective(const Vec& x) const override;

  const Vec& lambda() const { return lambda_; }
  const Vec& x_star() const { return x_star_; }
  double sigma() const { return sigma_; }

  // Closed-form stationary distribution of constant-step SGD (nu = 0) on
  // this problem: per-coordinate mean xstar_i and variance
  //   v_i = alpha sigma^2 / (lambda_i (2 - alpha lambda_i)).
  // Requires alpha * lambda_i < 2 for every coordinate (UnstableStep).
  struct StationaryMoments {
    Vec mean;
    Vec var;
  };
  StationaryMoments sgd_stationary_moments(double alpha) const;

 private:
  Vec lambda_;
  Vec x_star_;
  double sigma_;
  std::int64_t steps_per_epoch_;
};

// ---------------------------------------------------------------------------
// L2-regularized logistic regression
// ---------------------------------------------------------------------------

// Binary logistic regression on rows (a_i, y_i), y in {0, 1}:
//   F(w) = 1/n sum_i log(1 + exp(-s_i <w, a_i>)) + (l2/2) ||w||^2,
// s_i = 2 y_i - 1. Minibatch losses/gradients average over a without-
// replacement batch and include the regularizer, so they are unbiased
// for F and grad F.
class LogisticRegression final : public StochasticProblem {
 public:
  LogisticRegression(std::vector<Vec> features, std::vector<int> labels,
                     std::int64_t batch, double l2);

  std::size_t dim() const override { return p_; }
  std::int64_t dataset_size() const override {
    return static_cast<std::int64_t>(features_.size());
  }
  std::int64_t batch_size() const override { return batch_; }
  std::int64_t steps_per_epoch() const override;

  void draw(Rng& rng, Sample& s) const override;
  double loss(const Sample& s, const Vec& w) const override;
  void gradient(const Sample& s, const Vec& w, Vec& g) const override;
  double objective(const Vec& w) const override;

  const std::vector<Vec>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  double l2() const { return l2_; }

 private:
  std::vector<Vec> features_;
  std::vector<int> labels_;
  std::size_t p_;
  std::int64_t batch_;
  double l2_;
};

// ---------------------------------------------------------------------------
// Dataset I/O and generation
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<Vec> features;
  std::vector<int> labels;  // 0/1
};

// Loads "label feature feature ..." rows, comma and/or whitespace separated.
// Lines that are blank or start with '#' are skipped. Labels must be exactly
// 0 or 1 and all rows must agree on the feature count; violations raise
// ParseError naming the 1-based line. With standardize = true, features are
// shifted/scaled per column to mean 0 and unit variance (constant columns
// are only centered).
Dataset load_dataset(const std::string& path, bool standardize);

// Writes a dataset in the same format with round-trippable float formatting.
void write_dataset(const std::string& path, const Dataset& data);

// Synthetic logistic data: features are iid standard normal, the label is
// Bernoulli(sigmoid(<w_true, a>)) with a fixed teacher vector drawn from the
// same seeded stream. Deterministic in (p, n, seed).
Dataset make_synthetic_logistic(std::size_t p, std::int64_t n,
                                std::uint64_t seed);

}  // namespace salsa
