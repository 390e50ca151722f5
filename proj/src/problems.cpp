#include "salsa/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace salsa {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  const double m = std::max(t, 0.0);
  return m + std::log1p(std::exp(-std::fabs(t)));
}

// 1 / (1 + exp(-u)) without overflow.
double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Minibatch sampling
// ---------------------------------------------------------------------------

void sample_minibatch(Rng& rng, std::int64_t n, std::int64_t b,
                      std::vector<std::int64_t>& out) {
  if (n < 1) throw ConfigError("sample_minibatch: dataset is empty");
  if (b < 1)
    throw ConfigError("sample_minibatch: batch size must be >= 1, got " +
                      std::to_string(b));
  if (b > n)
    throw ConfigError("sample_minibatch: batch size " + std::to_string(b) +
                      " exceeds dataset size " + std::to_string(n));
  out.clear();
  out.reserve(static_cast<std::size_t>(b));
  // Floyd's sampling: uniform without replacement in O(b) draws.
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(b) * 2);
  for (std::int64_t j = n - b; j < n; ++j) {
    const auto t =
        static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(j + 1)));
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Noisy quadratic
// ---------------------------------------------------------------------------

NoisyQuadratic::NoisyQuadratic(Vec lambda, Vec x_star, double sigma,
                               std::int64_t steps_per_epoch)
    : lambda_(std::move(lambda)),
      x_star_(std::move(x_star)),
      sigma_(sigma),
      steps_per_epoch_(steps_per_epoch) {
  require_same_dim(lambda_, x_star_, "NoisyQuadratic");
  if (lambda_.empty()) throw ConfigError("NoisyQuadratic: dimension is zero");
  for (double l : lambda_)
    if (!(l > 0.0))
      throw ConfigError("NoisyQuadratic: eigenvalues must be positive");
  if (!(sigma_ >= 0.0))
    throw ConfigError("NoisyQuadratic: sigma must be >= 0");
  if (steps_per_epoch_ < 1)
    throw ConfigError("NoisyQuadratic: steps_per_epoch must be >= 1");
}

void NoisyQuadratic::draw(Rng& rng, Sample& s) const {
  s.idx.clear();
  s.noise.resize(lambda_.size());
  rng.fill_normal(s.noise);
}

double NoisyQuadratic::loss(const Sample& s, const Vec& x) const {
  require_same_dim(x, lambda_, "NoisyQuadratic::loss");
  require_same_dim(s.noise, lambda_, "NoisyQuadratic::loss (sample)");
  double f = objective(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    f += sigma_ * s.noise[i] * (x[i] - x_star_[i]);
  return f;
}

void NoisyQuadratic::gradient(const Sample& s, const Vec& x, Vec& g) const {
  require_same_dim(x, lambda_, "NoisyQuadratic::gradient");
  require_same_dim(s.noise, lambda_, "NoisyQuadratic::gradient (sample)");
  g.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    g[i] = lambda_[i] * (x[i] - x_star_[i]) + sigma_ * s.noise[i];
}

double NoisyQuadratic::objective(const Vec& x) const {
  require_same_dim(x, lambda_, "NoisyQuadratic::objective");
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - x_star_[i];
    f += 0.5 * lambda_[i] * dx * dx;
  }
  return f;
}

NoisyQuadratic::StationaryMoments NoisyQuadratic::sgd_stationary_moments(
    double alpha) const {
  if (!(alpha > 0.0))
    throw ConfigError("sgd_stationary_moments: alpha must be positive");
  StationaryMoments m;
  m.mean = x_star_;
  m.var.resize(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    const double al = alpha * lambda_[i];
    if (al >= 2.0)
      throw UnstableStep("sgd_stationary_moments: alpha * lambda = " +
                         std::to_string(al) + " >= 2 at coordinate " +
                         std::to_string(i));
    m.var[i] = alpha * sigma_ * sigma_ / (lambda_[i] * (2.0 - al));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

LogisticRegression::LogisticRegression(std::vector<Vec> features,
                                       std::vector<int> labels,
                                       std::int64_t batch, double l2)
    : features_(std::move(features)), labels_(std::move(labels)), batch_(batch),
      l2_(l2) {
  if (features_.empty())
    throw ConfigError("LogisticRegression: dataset is empty");
  if (features_.size() != labels_.size())
    throw ConfigError("LogisticRegression: feature/label count mismatch");
  p_ = features_.front().size();
  if (p_ == 0) throw ConfigError("LogisticRegression: zero feature dimension");
  for (const Vec& row : features_)
    if (row.size() != p_)
      throw ConfigError("LogisticRegression: inconsistent feature dimensions");
  for (int y : labels_)
    if (y != 0 && y != 1)
      throw ConfigError("LogisticRegression: labels must be 0 or 1");
  const auto n = static_cast<std::int64_t>(features_.size());
  if (batch_ < 1 || batch_ > n)
    throw ConfigError("LogisticRegression: batch size " +
                      std::to_string(batch_) + " out of range [1, " +
                      std::to_string(n) + "]");
  if (!(l2_ >= 0.0))
    throw ConfigError("LogisticRegression: l2 must be >= 0");
}

std::int64_t LogisticRegression::steps_per_epoch() const {
  const auto n = static_cast<std::int64_t>(features_.size());
  return (n + batch_ - 1) / batch_;
}

void LogisticRegression::draw(Rng& rng, Sample& s) const {
  s.noise.clear();
  sample_minibatch(rng, static_cast<std::int64_t>(features_.size()), batch_,
                   s.idx);
}

double LogisticRegression::loss(const Sample& s, const Vec& w) const {
  require_same_dim(w, features_.front(), "LogisticRegression::loss");
  if (s.idx.empty())
    throw ConfigError("LogisticRegression::loss: sample has no batch indices");
  double f = 0.0;
  for (std::int64_t i : s.idx) {
    const Vec& a = features_[static_cast<std::size_t>(i)];
    const double sgn = 2.0 * labels_[static_cast<std::size_t>(i)] - 1.0;
    f += softplus(-sgn * dot(w, a));
  }
  f /= static_cast<double>(s.idx.size());
  return f + 0.5 * l2_ * norm_sq(w);
}

void LogisticRegression::gradient(const Sample& s, const Vec& w, Vec& g) const {
  require_same_dim(w, features_.front(), "LogisticRegression::gradient");
  if (s.idx.empty())
    throw ConfigError(
        "LogisticRegression::gradient: sample has no batch indices");
  g.assign(w.size(), 0.0);
  for (std::int64_t i : s.idx) {
    const Vec& a = features_[static_cast<std::size_t>(i)];
    const double sgn = 2.0 * labels_[static_cast<std::size_t>(i)] - 1.0;
    // d/dw softplus(-sgn <w,a>) = -sgn * sigmoid(-sgn <w,a>) * a
    const double coef = -sgn * sigmoid(-sgn * dot(w, a));
    axpy(coef, a, g);
  }
  const double inv_b = 1.0 / static_cast<double>(s.idx.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = g[j] * inv_b + l2_ * w[j];
}

double LogisticRegression::objective(const Vec& w) const {
  require_same_dim(w, features_.front(), "LogisticRegression::objective");
  double f = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double sgn = 2.0 * labels_[i] - 1.0;
    f += softplus(-sgn * dot(w, features_[i]));
  }
  f /= static_cast<double>(features_.size());
  return f + 0.5 * l2_ * norm_sq(w);
}

// ---------------------------------------------------------------------------
// Dataset I/O and generation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void row_error(const std::string& path, std::int64_t line,
                            const std::string& what) {
  throw ParseError(path + ": line " + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& tok, double& out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

}  // namespace

Dataset load_dataset(const std::string& path, bool standardize) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  Dataset data;
  std::string line;
  std::int64_t lineno = 0;
  std::size_t p = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Commas count as separators; '#' starts a comment line.
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    std::string tok;
    std::vector<std::string> toks;
    while (ss >> tok) toks.push_back(tok);
    if (toks.empty() || toks.front().front() == '#') continue;

    double label = 0.0;
    if (!parse_double(toks.front(), label))
      row_error(path, lineno, "cannot parse label '" + toks.front() + "'");
    if (label != 0.0 && label != 1.0)
      row_error(path, lineno,
                "label must be 0 or 1, got '" + toks.front() + "'");
    if (toks.size() < 2) row_error(path, lineno, "row has no features");

    Vec row(toks.size() - 1);
    for (std::size_t j = 1; j < toks.size(); ++j) {
      if (!parse_double(toks[j], row[j - 1]))
        row_error(path, lineno, "cannot parse feature '" + toks[j] + "'");
    }
    if (p == 0) {
      p = row.size();
    } else if (row.size() != p) {
      row_error(path, lineno,
                "expected " + std::to_string(p) + " features, got " +
                    std::to_string(row.size()));
    }
    data.features.push_back(std::move(row));
    data.labels.push_back(static_cast<int>(label));
  }
  if (data.features.empty()) throw ParseError(path + ": no data rows");

  if (standardize) {
    const auto n = static_cast<double>(data.features.size());
    for (std::size_t j = 0; j < p; ++j) {
      double m = 0.0;
      for (const Vec& r : data.features) m += r[j];
      m /= n;
      double ss = 0.0;
      for (const Vec& r : data.features) ss += (r[j] - m) * (r[j] - m);
      const double sd = std::sqrt(ss / n);
      const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
      for (Vec& r : data.features) r[j] = (r[j] - m) * scale;
    }
  }
  return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
  if (data.features.size() != data.labels.size())
    throw ConfigError("write_dataset: feature/label count mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  char buf[40];
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    out << data.labels[i];
    for (double v : data.features[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

Dataset make_synthetic_logistic(std::size_t p, std::int64_t n,
                                std::uint64_t seed) {
  if (p == 0 || n < 1)
    throw ConfigError("make_synthetic_logistic: need p >= 1 and n >= 1");
  Rng rng(seed);
  // Teacher vector with ||w||^2 ~ 4 so logits have SD ~ 2: informative
  // labels with genuine class overlap.
  Vec teacher(p);
  const double scale = 2.0 / std::sqrt(static_cast<double>(p));
  for (double& w : teacher) w = scale * rng.normal();

  Dataset data;
  data.features.reserve(static_cast<std::size_t>(n));
  data.labels.reserve(static_cast<std::size_t>(n));
  Vec row(p);
  for (std::int64_t i = 0; i < n; ++i) {
    rng.fill_normal(row);
    const double prob = sigmoid(dot(teacher, row));
    data.features.push_back(row);
    data.labels.push_back(rng.uniform01() < prob ? 1 : 0);
  }
  return data;
}

}  // namespace salsa
