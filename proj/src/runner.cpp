#include "salsa/runner.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "salsa/errors.hpp"
#include "salsa/optim.hpp"
#include "salsa/rng.hpp"
#include "salsa/ssls.hpp"

namespace salsa {

RunResult run_experiment(const ResolvedConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.rule.validate();

  auto prob = cfg.problem.make();
  const std::size_t dim = prob->dim();
  const std::int64_t spe = prob->steps_per_epoch();
  const std::int64_t total = cfg.total_iters;

  Rng rng(cfg.seed);
  Vec x0 = cfg.problem.x0;
  if (x0.empty()) x0 = zeros(dim);
  if (x0.size() != dim)
    throw ConfigError("problem.x0: expected dimension " + std::to_string(dim));
  IterateState s = IterateState::init(x0, cfg.alpha0);

  // Controllers (constructed only for the scheduler that needs them).
  std::optional<SasaPlusController> sasa;
  std::optional<SalsaController> salsa_ctrl;
  std::optional<SampleWindow> slope_win;
  std::unordered_set<std::int64_t> cut_at(cfg.cut_iterations.begin(),
                                          cfg.cut_iterations.end());
  switch (cfg.scheduler) {
    case SchedulerKind::SasaPlus:
      sasa.emplace(cfg.sasa);
      break;
    case SchedulerKind::Salsa: {
      SalsaConfig sc;
      sc.ssls = cfg.ssls;
      sc.sasa = cfg.sasa;
      sc.slope_enabled = cfg.slope_enabled;
      salsa_ctrl.emplace(sc);
      break;
    }
    case SchedulerKind::SlopeOnly:
      slope_win.emplace(cfg.sasa.theta);
      slope_win->reset(0);
      break;
    default:
      break;
  }

  RunResult res;
  res.cfg = cfg;
  res.alpha_trace.reserve(static_cast<std::size_t>(total));
  res.objective_initial = prob->objective(s.x);

  Sample sample;
  Vec g(dim);
  double ema = 0.0;
  Vec x_sum = zeros(dim);
  const std::int64_t avg_from = std::max<std::int64_t>(1, total - spe + 1);
  std::int64_t avg_count = 0;

  auto grad_at = [&](const Vec& y, Vec& out) { prob->gradient(sample, y, out); };

  for (std::int64_t k = 1; k <= total; ++k) {
    prob->draw(rng, sample);
    const double f = prob->loss(sample, s.x);

    const bool warmup = cfg.scheduler == SchedulerKind::Ssls ||
                        (cfg.scheduler == SchedulerKind::Salsa &&
                         salsa_ctrl->phase() == Phase::Warmup);

    int ls_evals = 0;
    double alpha_used = s.alpha;
    if (cfg.nag_direct) {
      s.d = nag_direction(cfg.rule.beta, s.x, s.d, s.alpha, grad_at);
      if (warmup && !cfg.ssls.probe_along_direction)
        prob->gradient(sample, s.x, g);  // probe direction
    } else {
      prob->gradient(sample, s.x, g);
      qhm_direction(cfg.rule, g, s.h, s.d);
    }
    if (warmup) {
      const Vec& probe = cfg.ssls.probe_along_direction ? s.d : g;
      const ArmijoResult pr = armijo_probe(
          [&](const Vec& y) { return prob->loss(sample, y); }, s.x, probe, f,
          s.alpha, cfg.ssls);
      ls_evals = pr.evals;
      alpha_used = smooth_alpha(s.alpha, pr.eta, cfg.ssls.gamma);
    }

    const double delta_k = delta_statistic(s.x, s.d, alpha_used);
    apply_step(s, s.d, alpha_used);
    s.alpha = alpha_used;

    // --- scheduler bookkeeping -------------------------------------------
    bool delta_tested = false, slope_tested = false;
    TestVerdict dv, sv;
    double si = 0.0, sb = 0.0, so = 0.0;
    bool dropped = false;

    switch (cfg.scheduler) {
      case SchedulerKind::Constant:
      case SchedulerKind::Ssls:
        break;
      case SchedulerKind::ConstantAndCut:
        if (cut_at.count(k)) {
          ScheduleEvent ev;
          ev.iteration = k;
          ev.alpha_old = s.alpha;
          ev.alpha_new = s.alpha * cfg.cut_factor;
          res.drops.push_back({ev, "fixed_schedule"});
          s.alpha = ev.alpha_new;
          dropped = true;
        }
        break;
      case SchedulerKind::SasaPlus: {
        const ControllerStep st = sasa->observe(k, delta_k, s.alpha);
        if (st.tested) {
          delta_tested = true;
          dv = st.verdict;
          si = st.sigma_iid;
          sb = st.sigma_bm;
          so = st.sigma_olbm;
        }
        if (st.event) {
          res.drops.push_back({*st.event, "sasa"});
          dropped = true;
        }
        s.alpha = st.alpha_next;
        break;
      }
      case SchedulerKind::SlopeOnly: {
        slope_win->append(f, k);
        if (k % cfg.sasa.test_every == 0 &&
            slope_win->exposed_count(k) > cfg.sasa.n_min) {
          const std::span<const double> w = slope_win->exposed(k);
          sv = slope_test(w, cfg.sasa.delta);
          slope_tested = true;
          si = variance_estimate(w, EstimatorKind::IID).sigma_sq;
          sb = variance_estimate(w, EstimatorKind::BM).sigma_sq;
          so = variance_estimate(w, EstimatorKind::OLBM).sigma_sq;
          if (sv.decision == Decision::NotDecreasing) {
            ScheduleEvent ev;
            ev.iteration = k;
            ev.alpha_old = s.alpha;
            ev.alpha_new = s.alpha * cfg.sasa.tau;
            ev.verdict = sv;
            res.drops.push_back({ev, "slope"});
            s.alpha = ev.alpha_new;
            slope_win->reset(k);
            dropped = true;
          }
        }
        break;
      }
      case SchedulerKind::Salsa: {
        const SalsaStep st = salsa_ctrl->observe(k, delta_k, f, s.alpha);
        if (st.tested) {
          delta_tested = true;
          dv = st.delta_verdict;
          si = st.sigma_iid;
          sb = st.sigma_bm;
          so = st.sigma_olbm;
        }
        if (st.slope_tested) {
          slope_tested = true;
          sv = st.slope_verdict;
        }
        if (st.switched) {
          res.switch_event = st.switched;
          res.switch_iteration = k;
        }
        if (st.drop) {
          res.drops.push_back({*st.drop, "sasa"});
          dropped = true;
        }
        s.alpha = st.alpha_next;
        break;
      }
    }

    // --- logging ----------------------------------------------------------
    ema = (k == 1) ? f : 0.01 * f + 0.99 * ema;
    res.alpha_trace.push_back(alpha_used);
    if (k >= avg_from) {
      axpy(1.0, s.x, x_sum);
      avg_count += 1;
    }
    if (warmup)
      res.max_ls_evals_warmup = std::max(res.max_ls_evals_warmup, ls_evals);
    else
      res.max_ls_evals_adaptive =
          std::max(res.max_ls_evals_adaptive, ls_evals);

    const bool log_now = (k % cfg.log_every == 0) || k == 1 || k == total ||
                         delta_tested || slope_tested || dropped ||
                         (res.switch_iteration == k);
    if (log_now) {
      MetricRow row;
      row.iteration = k;
      row.epoch = static_cast<double>(k) / static_cast<double>(spe);
      row.loss = f;
      row.loss_smooth = ema;
      row.alpha = alpha_used;
      row.phase = warmup ? "warmup" : "adaptive";
      row.ls_evals = ls_evals;
      row.has_delta_test = delta_tested;
      row.delta_verdict = dv;
      row.sigma_iid = si;
      row.sigma_bm = sb;
      row.sigma_olbm = so;
      row.has_slope_test = slope_tested;
      row.slope_verdict = sv;
      res.rows.push_back(std::move(row));
    }
    if (delta_tested) {
      TestLogEntry e;
      e.iteration = k;
      e.is_slope = false;
      e.verdict = dv;
      e.sigma_iid = si;
      e.sigma_bm = sb;
      e.sigma_olbm = so;
      e.alpha = alpha_used;
      e.phase = warmup ? "warmup" : "adaptive";
      res.tests.push_back(std::move(e));
    }
    if (slope_tested) {
      TestLogEntry e;
      e.iteration = k;
      e.is_slope = true;
      e.verdict = sv;
      if (cfg.scheduler == SchedulerKind::SlopeOnly) {
        e.sigma_iid = si;
        e.sigma_bm = sb;
        e.sigma_olbm = so;
      }
      e.alpha = alpha_used;
      e.phase = warmup ? "warmup" : "adaptive";
      res.tests.push_back(std::move(e));
    }
  }

  res.x_final = s.x;
  res.final_alpha = s.alpha;
  res.final_loss = res.rows.empty() ? 0.0 : res.rows.back().loss;
  res.final_loss_smooth = ema;
  res.objective_final = prob->objective(s.x);
  if (avg_count > 0) {
    res.x_avg_last_epoch = x_sum;
    for (double& v : res.x_avg_last_epoch) v /= static_cast<double>(avg_count);
    res.objective_avg = prob->objective(res.x_avg_last_epoch);
  } else {
    res.x_avg_last_epoch = s.x;
    res.objective_avg = res.objective_final;
  }

  const auto t_end = std::chrono::steady_clock::now();
  res.wall_seconds =
      std::chrono::duration<double>(t_end - t_start).count();
  return res;
}

RunResult run_sasa_plus(const ProblemSpec& problem, const DirectionRule& rule,
                        const SasaPlusConfig& sasa, double alpha0,
                        std::int64_t total_iters, std::uint64_t seed) {
  ResolvedConfig cfg;
  cfg.problem = problem;
  cfg.rule = rule;
  cfg.scheduler = SchedulerKind::SasaPlus;
  cfg.sasa = sasa;
  cfg.alpha0 = alpha0;
  cfg.total_iters = total_iters;
  cfg.seed = seed;
  return run_experiment(cfg);
}

RunResult run_salsa(const ProblemSpec& problem, const DirectionRule& rule,
                    const SalsaConfig& salsa, double alpha0,
                    std::int64_t total_iters, std::uint64_t seed) {
  ResolvedConfig cfg;
  cfg.problem = problem;
  cfg.rule = rule;
  cfg.scheduler = SchedulerKind::Salsa;
  cfg.sasa = salsa.sasa;
  cfg.ssls = salsa.ssls;
  cfg.slope_enabled = salsa.slope_enabled;
  cfg.alpha0 = alpha0;
  cfg.total_iters = total_iters;
  cfg.seed = seed;
  return run_experiment(cfg);
}

}  // namespace salsa
