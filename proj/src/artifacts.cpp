#include "salsa/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "salsa/errors.hpp"

namespace salsa {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

ordered_json verdict_to_json(const TestVerdict& v) {
  ordered_json j;
  j["decision"] = decision_name(v.decision);
  j["mean"] = v.mean;
  j["half_width"] = v.half_width;
  j["sigma_sq"] = v.sigma_sq;
  j["dof"] = v.dof;
  j["n"] = v.n_used;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << text;
}

constexpr const char* kMetricsHeader =
    "iteration,epoch,loss,loss_smooth,alpha,phase,ls_evals,"
    "delta_mean,delta_half_width,delta_sigma_sq,delta_dof,delta_n,"
    "sigma_iid,sigma_bm,sigma_olbm,"
    "slope,slope_t,slope_half_width,slope_n";

std::string metrics_csv(const RunResult& res) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const MetricRow& r : res.rows) {
    out += std::to_string(r.iteration);
    out += ',';
    out += fmt_g17(r.epoch);
    out += ',';
    out += fmt_g17(r.loss);
    out += ',';
    out += fmt_g17(r.loss_smooth);
    out += ',';
    out += fmt_g17(r.alpha);
    out += ',';
    out += r.phase;
    out += ',';
    out += std::to_string(r.ls_evals);
    if (r.has_delta_test) {
      const TestVerdict& v = r.delta_verdict;
      out += ',' + fmt_g17(v.mean) + ',' + fmt_g17(v.half_width) + ',' +
             fmt_g17(v.sigma_sq) + ',' + std::to_string(v.dof) + ',' +
             std::to_string(v.n_used) + ',' + fmt_g17(r.sigma_iid) + ',' +
             fmt_g17(r.sigma_bm) + ',' + fmt_g17(r.sigma_olbm);
    } else if (r.has_slope_test && r.sigma_olbm != 0.0) {
      // slope-only runs still log the estimator comparison
      out += ",,,,,," + fmt_g17(r.sigma_iid) + ',' + fmt_g17(r.sigma_bm) +
             ',' + fmt_g17(r.sigma_olbm);
    } else {
      out += ",,,,,,,,";
    }
    if (r.has_slope_test) {
      const TestVerdict& v = r.slope_verdict;
      out += ',' + fmt_g17(v.mean) + ',' + fmt_g17(v.t_stat) + ',' +
             fmt_g17(v.half_width) + ',' + std::to_string(v.n_used);
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

std::string events_jsonl(const RunResult& res) {
  // rank orders entries within one iteration: tests, then drops, then switch
  struct Entry {
    std::int64_t iteration;
    int rank;
    std::size_t seq;
    ordered_json j;
  };
  std::vector<Entry> entries;
  std::size_t seq = 0;
  for (const TestLogEntry& t : res.tests) {
    ordered_json j;
    j["type"] = "test";
    j["iteration"] = t.iteration;
    j["stat"] = t.is_slope ? "slope" : "delta";
    j["decision"] = decision_name(t.verdict.decision);
    j["mean"] = t.verdict.mean;
    j["half_width"] = t.verdict.half_width;
    j["sigma_sq"] = t.verdict.sigma_sq;
    j["dof"] = t.verdict.dof;
    j["n"] = t.verdict.n_used;
    if (t.is_slope) {
      j["t_stat"] = t.verdict.t_stat;
    }
    if (!t.is_slope || t.sigma_olbm != 0.0) {
      j["sigma_iid"] = t.sigma_iid;
      j["sigma_bm"] = t.sigma_bm;
      j["sigma_olbm"] = t.sigma_olbm;
    }
    j["alpha"] = t.alpha;
    j["phase"] = t.phase;
    entries.push_back({t.iteration, 0, seq++, std::move(j)});
  }
  for (const DropLogEntry& d : res.drops) {
    ordered_json j;
    j["type"] = "drop";
    j["iteration"] = d.event.iteration;
    j["source"] = d.source;
    j["alpha_old"] = d.event.alpha_old;
    j["alpha_new"] = d.event.alpha_new;
    if (d.source != "fixed_schedule")
      j["verdict"] = verdict_to_json(d.event.verdict);
    entries.push_back({d.event.iteration, 1, seq++, std::move(j)});
  }
  if (res.switch_event) {
    const SwitchEvent& s = *res.switch_event;
    ordered_json j;
    j["type"] = "switch";
    j["iteration"] = s.iteration;
    j["alpha"] = s.alpha;
    j["x_stationary"] = s.x_stationary;
    j["f_stationary"] = s.f_stationary;
    j["delta_verdict"] = verdict_to_json(s.delta_verdict);
    if (s.slope_verdict.n_used > 0)
      j["slope_verdict"] = verdict_to_json(s.slope_verdict);
    entries.push_back({s.iteration, 2, seq++, std::move(j)});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     if (a.iteration != b.iteration)
                       return a.iteration < b.iteration;
                     if (a.rank != b.rank) return a.rank < b.rank;
                     return a.seq < b.seq;
                   });
  std::string out;
  for (const Entry& e : entries) {
    out += e.j.dump();
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunResult& res) {
  ordered_json j;
  j["timestamp"] = utc_timestamp();
  j["wall_seconds"] = res.wall_seconds;
  j["scheduler"] = scheduler_name(res.cfg.scheduler);
  j["seed"] = res.cfg.seed;
  j["total_iters"] = res.cfg.total_iters;
  j["final_alpha"] = res.final_alpha;
  j["final_loss"] = res.final_loss;
  j["final_loss_smooth"] = res.final_loss_smooth;
  j["objective_initial"] = res.objective_initial;
  j["objective_final"] = res.objective_final;
  j["objective_avg_last_epoch"] = res.objective_avg;
  j["n_drops"] = res.drops.size();
  j["switch_iteration"] = res.switch_iteration;
  j["max_ls_evals_warmup"] = res.max_ls_evals_warmup;
  j["max_ls_evals_adaptive"] = res.max_ls_evals_adaptive;
  return j.dump(2) + "\n";
}

}  // namespace

void write_run_artifacts(const RunResult& res, const std::string& dir) {
  fs::create_directories(dir);
  write_text(fs::path(dir) / "config.json", res.cfg.to_json().dump(2) + "\n");
  write_text(fs::path(dir) / "metrics.csv", metrics_csv(res));
  write_text(fs::path(dir) / "events.jsonl", events_jsonl(res));
  write_text(fs::path(dir) / "summary.json", summary_json(res));
}

// ---------------------------------------------------------------------------
// Reading artifacts back (plot-data, validation)
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct MetricsTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name, const std::string& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ParseError(file + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

MetricsTable read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": missing artifact");
  MetricsTable t;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": empty file");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
  }
  return t;
}

std::vector<json> read_events(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": missing artifact");
  std::vector<json> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + ": line " + std::to_string(lineno) +
                       ": invalid JSON: " + e.what());
    }
  }
  return out;
}

double to_num(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError(what + ": cannot parse number '" + s + "'");
  return v;
}

}  // namespace

void emit_plot_data(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const MetricsTable m = read_metrics(dir / "metrics.csv");
  const std::vector<json> events = read_events(dir / "events.jsonl");

  const fs::path plots = dir / "plots";
  fs::create_directories(plots);

  const std::string mfile = (dir / "metrics.csv").string();
  const std::size_t c_iter = m.col("iteration", mfile);
  const std::size_t c_loss = m.col("loss", mfile);
  const std::size_t c_smooth = m.col("loss_smooth", mfile);
  const std::size_t c_alpha = m.col("alpha", mfile);

  std::string lr = "iteration,series,value\n";
  std::string loss = "iteration,series,value\n";
  for (const auto& row : m.rows) {
    lr += row[c_iter] + ",alpha," + row[c_alpha] + "\n";
    loss += row[c_iter] + ",loss," + row[c_loss] + "\n";
    loss += row[c_iter] + ",loss_smooth," + row[c_smooth] + "\n";
  }

  std::string dci = "iteration,series,value\n";
  std::string var = "iteration,series,value\n";
  for (const json& e : events) {
    if (e.value("type", "") != "test") continue;
    const auto iter = std::to_string(e.at("iteration").get<std::int64_t>());
    if (e.value("stat", "") == "delta") {
      const double mean = e.at("mean").get<double>();
      const double hw = e.at("half_width").get<double>();
      dci += iter + ",mean," + fmt_g17(mean) + "\n";
      dci += iter + ",lower," + fmt_g17(mean - hw) + "\n";
      dci += iter + ",upper," + fmt_g17(mean + hw) + "\n";
    }
    if (e.contains("sigma_iid")) {
      var += iter + ",iid," + fmt_g17(e.at("sigma_iid").get<double>()) + "\n";
      var += iter + ",bm," + fmt_g17(e.at("sigma_bm").get<double>()) + "\n";
      var +=
          iter + ",olbm," + fmt_g17(e.at("sigma_olbm").get<double>()) + "\n";
    }
  }

  write_text(plots / "lr_trace.csv", lr);
  write_text(plots / "loss.csv", loss);
  write_text(plots / "delta_ci.csv", dci);
  write_text(plots / "variance_comparison.csv", var);
}

namespace {

struct DropRecord {
  std::int64_t iteration;
  double alpha_old;
  double alpha_new;
  std::string source;
};

}  // namespace

std::optional<std::string> validate_run_dir(const std::string& run_dir) {
  const fs::path dir(run_dir);

  std::ifstream cin(dir / "config.json");
  if (!cin) return "config.json: missing artifact";
  json cdoc;
  try {
    cdoc = json::parse(cin);
  } catch (const json::parse_error& e) {
    return std::string("config.json: invalid JSON: ") + e.what();
  }
  ResolvedConfig cfg;
  try {
    cfg = parse_run_config(cdoc);
  } catch (const std::exception& e) {
    return std::string("config.json: ") + e.what();
  }

  MetricsTable m;
  std::vector<json> events;
  try {
    m = read_metrics(dir / "metrics.csv");
    events = read_events(dir / "events.jsonl");
  } catch (const std::exception& e) {
    return e.what();
  }
  if (m.rows.empty()) return "metrics.csv: no data rows";

  const std::string mfile = (dir / "metrics.csv").string();
  const std::size_t c_iter = m.col("iteration", mfile);
  const std::size_t c_alpha = m.col("alpha", mfile);

  std::vector<std::int64_t> iters;
  std::vector<double> alphas;
  for (const auto& row : m.rows) {
    iters.push_back(
        static_cast<std::int64_t>(to_num(row[c_iter], "metrics.csv")));
    alphas.push_back(to_num(row[c_alpha], "metrics.csv"));
    if (!(alphas.back() > 0.0) || !std::isfinite(alphas.back()))
      return "alpha trace: non-positive or non-finite step size at iteration " +
             std::to_string(iters.back());
  }
  for (std::size_t i = 1; i < iters.size(); ++i)
    if (iters[i] <= iters[i - 1]) return "metrics.csv: iterations not increasing";

  std::vector<DropRecord> drops;
  std::int64_t switch_iter = -1;
  for (const json& e : events) {
    const std::string type = e.value("type", "");
    if (type == "drop") {
      drops.push_back({e.at("iteration").get<std::int64_t>(),
                       e.at("alpha_old").get<double>(),
                       e.at("alpha_new").get<double>(),
                       e.value("source", "")});
    } else if (type == "switch") {
      if (switch_iter >= 0) return "events.jsonl: multiple switch events";
      switch_iter = e.at("iteration").get<std::int64_t>();
    }
  }
  std::sort(drops.begin(), drops.end(),
            [](const DropRecord& a, const DropRecord& b) {
              return a.iteration < b.iteration;
            });

  // Phase boundary: iterations <= warmup_end use line-search stepping.
  std::int64_t warmup_end = 0;
  switch (cfg.scheduler) {
    case SchedulerKind::Ssls:
      warmup_end = cfg.total_iters + 1;
      break;
    case SchedulerKind::Salsa:
      warmup_end = switch_iter >= 0 ? switch_iter : cfg.total_iters + 1;
      break;
    default:
      warmup_end = 0;
      break;
  }

  // Drop-factor and placement checks.
  const bool drops_allowed = cfg.scheduler == SchedulerKind::ConstantAndCut ||
                             cfg.scheduler == SchedulerKind::SasaPlus ||
                             cfg.scheduler == SchedulerKind::SlopeOnly ||
                             cfg.scheduler == SchedulerKind::Salsa;
  if (!drops_allowed && !drops.empty())
    return "events.jsonl: drop events under a scheduler that never drops";
  if (switch_iter >= 0 && cfg.scheduler != SchedulerKind::Salsa)
    return "events.jsonl: switch event under a non-salsa scheduler";
  for (const DropRecord& d : drops) {
    const double factor = cfg.scheduler == SchedulerKind::ConstantAndCut
                              ? cfg.cut_factor
                              : cfg.sasa.tau;
    if (d.alpha_new != d.alpha_old * factor)
      return "drop at iteration " + std::to_string(d.iteration) +
             ": alpha_new != alpha_old * " + fmt_g17(factor);
    if (cfg.scheduler == SchedulerKind::Salsa && d.iteration <= warmup_end)
      return "drop at iteration " + std::to_string(d.iteration) +
             ": inside warmup phase";
  }
  if (cfg.scheduler == SchedulerKind::ConstantAndCut) {
    std::vector<std::int64_t> got;
    for (const DropRecord& d : drops) got.push_back(d.iteration);
    if (got != cfg.cut_iterations)
      return "constant_and_cut: logged cuts do not match configured "
             "cut_iterations";
  }

  // Segment-by-segment replay.
  std::size_t di = 0;
  for (std::size_t i = 0; i + 1 < iters.size(); ++i) {
    const std::int64_t k1 = iters[i];
    const std::int64_t k2 = iters[i + 1];
    const double a1 = alphas[i];
    const double a2 = alphas[i + 1];
    if (k2 <= warmup_end) {
      // Whole segment inside warmup: bracket the smoothed update.
      const double gap = static_cast<double>(k2 - k1);
      const double lo = std::pow(cfg.ssls.min_step_ratio(), gap);
      const double hi = std::pow(cfg.ssls.max_step_ratio(), gap);
      const double r = a2 / a1;
      if (!(r >= lo * (1.0 - 1e-9) && r <= hi * (1.0 + 1e-9)))
        return "warmup step-size ratio " + fmt_g17(r) + " outside bracket [" +
               fmt_g17(lo) + ", " + fmt_g17(hi) + "] between iterations " +
               std::to_string(k1) + " and " + std::to_string(k2);
      while (di < drops.size() && drops[di].iteration < k2) ++di;
      continue;
    }
    if (k1 < warmup_end)
      return "log too sparse: segment " + std::to_string(k1) + ".." +
             std::to_string(k2) + " straddles the phase switch";
    // Adaptive/constant segment: alpha changes only via logged drops.
    double expected = a1;
    while (di < drops.size() && drops[di].iteration < k2) {
      const DropRecord& d = drops[di];
      if (d.iteration >= k1) {
        if (expected != d.alpha_old)
          return "drop at iteration " + std::to_string(d.iteration) +
                 ": alpha_old " + fmt_g17(d.alpha_old) +
                 " does not match trace value " + fmt_g17(expected);
        expected = d.alpha_new;
      }
      ++di;
    }
    if (a2 != expected)
      return "alpha trace: value " + fmt_g17(a2) + " at iteration " +
             std::to_string(k2) + " differs from replayed value " +
             fmt_g17(expected);
  }
  return std::nullopt;
}

}  // namespace salsa
