#include "salsa/checks.hpp"

#include <algorithm>
#include <cmath>

#include "salsa/errors.hpp"
#include "salsa/optim.hpp"
#include "salsa/rng.hpp"

namespace salsa {

IdentityReport verify_shb_identity(const std::vector<Vec>& xs,
                                   const std::vector<Vec>& ds, double alpha,
                                   double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ConfigError("verify_shb_identity: beta must satisfy 0 <= beta < 1");
  if (!(alpha > 0.0))
    throw ConfigError("verify_shb_identity: alpha must be positive");
  if (xs.size() != ds.size() + 1)
    throw DimensionError("verify_shb_identity: need one more iterate than "
                         "directions");
  if (ds.size() < 2)
    throw NotEnoughSamples("verify_shb_identity: need at least 2 directions");

  const double ratio = (1.0 + beta) / (1.0 - beta);
  auto a_term = [&](std::size_t k) {
    return beta * norm_sq(xs[k]) - norm_sq(xs[k + 1]) -
           alpha * alpha * beta * norm_sq(ds[k]);
  };

  IdentityReport rep;
  Vec g;
  for (std::size_t k = 1; k < ds.size(); ++k) {
    g.resize(ds[k].size());
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = (ds[k][i] - beta * ds[k - 1][i]) / (1.0 - beta);
    const double lhs =
        dot(xs[k], g) - 0.5 * alpha * ratio * norm_sq(ds[k]);
    const double rhs =
        (a_term(k) - a_term(k - 1)) / (2.0 * alpha * (1.0 - beta));
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::fabs(lhs - rhs));
    rep.max_abs_lhs = std::max(rep.max_abs_lhs, std::fabs(lhs));
    rep.terms += 1;
  }
  rep.relative_residual = rep.max_abs_residual / (1.0 + rep.max_abs_lhs);
  return rep;
}

ChainStats collect_shb_chain(const StochasticProblem& prob, const Vec& x0,
                             double beta, double alpha, std::int64_t burnin,
                             std::int64_t samples, std::uint64_t seed,
                             std::int64_t keep_trajectory) {
  if (burnin < 0 || samples < 1)
    throw ConfigError("collect_shb_chain: need burnin >= 0 and samples >= 1");
  keep_trajectory = std::min(keep_trajectory, samples);
  const DirectionRule rule = DirectionRule::shb(beta);
  rule.validate();

  Rng rng(seed);
  IterateState s = IterateState::init(x0, alpha);
  Sample sample;
  Vec g(prob.dim());
  const double ratio = (1.0 + beta) / (1.0 - beta);

  ChainStats out;
  out.deltas.reserve(static_cast<std::size_t>(samples));
  out.yaidas.reserve(static_cast<std::size_t>(samples));
  out.dsqs.reserve(static_cast<std::size_t>(samples));
  if (keep_trajectory > 0) {
    out.xs.reserve(static_cast<std::size_t>(keep_trajectory) + 1);
    out.ds.reserve(static_cast<std::size_t>(keep_trajectory));
  }

  for (std::int64_t k = 0; k < burnin + samples; ++k) {
    prob.draw(rng, sample);
    prob.gradient(sample, s.x, g);
    qhm_direction(rule, g, s.h, s.d);
    if (k >= burnin) {
      const double dsq = norm_sq(s.d);
      out.deltas.push_back(dot(s.x, s.d) - 0.5 * alpha * dsq);
      out.yaidas.push_back(dot(s.x, g) - 0.5 * alpha * ratio * dsq);
      out.dsqs.push_back(dsq);
      if (keep_trajectory > 0 &&
          out.ds.size() < static_cast<std::size_t>(keep_trajectory)) {
        out.xs.push_back(s.x);
        out.ds.push_back(s.d);
      }
    }
    apply_step(s, s.d, alpha);
    if (keep_trajectory > 0 &&
        out.ds.size() == static_cast<std::size_t>(keep_trajectory) &&
        out.xs.size() == out.ds.size()) {
      out.xs.push_back(s.x);  // closing iterate x_T
    }
  }
  return out;
}

namespace {

void mean_and_se(std::span<const double> z, double& mean, double& se) {
  double s = 0.0;
  for (double v : z) s += v;
  mean = s / static_cast<double>(z.size());
  const VarianceEstimate est = variance_estimate(z, EstimatorKind::OLBM);
  se = std::sqrt(est.sigma_sq / static_cast<double>(z.size()));
}

}  // namespace

bool StationaryMeansReport::within(double z) const {
  auto ok = [z](double m, double se) {
    if (se == 0.0) return m == 0.0;
    return std::fabs(m) <= z * se;
  };
  return ok(delta_mean, delta_se) && ok(yaida_mean, yaida_se) &&
         ok(dsq_diff_mean, dsq_diff_se);
}

StationaryMeansReport stationary_means_report(std::span<const double> deltas,
                                std::span<const double> yaidas,
                                std::span<const double> dsqs) {
  if (deltas.size() != yaidas.size() || deltas.size() != dsqs.size())
    throw DimensionError("stationary_means_report: trace lengths differ");
  if (deltas.size() < 8)
    throw NotEnoughSamples("stationary_means_report: need at least 8 samples");

  StationaryMeansReport rep;
  rep.n = static_cast<std::int64_t>(deltas.size());
  mean_and_se(deltas, rep.delta_mean, rep.delta_se);
  mean_and_se(yaidas, rep.yaida_mean, rep.yaida_se);

  std::vector<double> diffs(dsqs.size() - 1);
  for (std::size_t i = 0; i + 1 < dsqs.size(); ++i)
    diffs[i] = dsqs[i + 1] - dsqs[i];
  mean_and_se(diffs, rep.dsq_diff_mean, rep.dsq_diff_se);
  return rep;
}

}  // namespace salsa
