#include "salsa/ssls.hpp"

#include <cmath>
#include <string>

namespace salsa {

SslsConfig SslsConfig::defaults(std::int64_t n, std::int64_t b) {
  if (n < 1 || b < 1 || b > n)
    throw ConfigError("SslsConfig::defaults: need 1 <= b <= n");
  SslsConfig cfg;
  cfg.gamma = std::sqrt(static_cast<double>(b) / static_cast<double>(n));
  return cfg;
}

void SslsConfig::validate() const {
  if (!(c > 0.0 && c < 0.5))
    throw ConfigError("SslsConfig: c must lie in (0, 1/2), got " +
                      std::to_string(c));
  if (!(rho_inc >= 1.0))
    throw ConfigError("SslsConfig: rho_inc must be >= 1");
  if (!(rho_dec > 0.0 && rho_dec < 1.0))
    throw ConfigError("SslsConfig: rho_dec must lie in (0, 1)");
  if (max_tries < 1)
    throw ConfigError("SslsConfig: max_tries must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("SslsConfig: gamma must lie in [0, 1]");
}

ArmijoResult armijo_probe(const std::function<double(const Vec&)>& loss_at,
                          const Vec& x, const Vec& probe_dir, double f_x,
                          double alpha_prev, const SslsConfig& cfg) {
  cfg.validate();
  if (!(alpha_prev > 0.0))
    throw ConfigError("armijo_probe: alpha_prev must be positive");

  const double g_sq = norm_sq(probe_dir);
  double eta = cfg.rho_inc * alpha_prev;
  ArmijoResult res;
  Vec trial(x.size());
  for (int t = 0; t < cfg.max_tries; ++t) {
    for (std::size_t i = 0; i < x.size(); ++i)
      trial[i] = x[i] - eta * probe_dir[i];
    const double f_trial = loss_at(trial);
    res.evals += 1;
    if (std::isfinite(f_trial) && f_trial < f_x - cfg.c * eta * g_sq) {
      res.accepted = true;
      break;
    }
    // Backtrack; this also runs after the final failed try, so an exhausted
    // search hands back the last candidate shrunk once more.
    eta *= cfg.rho_dec;
  }
  res.eta = eta;
  return res;
}

double ssls_epoch_growth_bound(const SslsConfig& cfg, std::int64_t steps) {
  cfg.validate();
  if (steps < 0) throw ConfigError("ssls_epoch_growth_bound: steps must be >= 0");
  return std::pow(cfg.max_step_ratio(), static_cast<double>(steps));
}

}  // namespace salsa
