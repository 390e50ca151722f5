#include "salsa/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "salsa/errors.hpp"

namespace salsa {

using nlohmann::json;
using nlohmann::ordered_json;

const char* scheduler_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Constant: return "constant";
    case SchedulerKind::ConstantAndCut: return "constant_and_cut";
    case SchedulerKind::SasaPlus: return "sasa_plus";
    case SchedulerKind::Ssls: return "ssls";
    case SchedulerKind::Salsa: return "salsa";
    case SchedulerKind::SlopeOnly: return "slope_only";
  }
  return "?";
}

namespace {

SchedulerKind scheduler_from_name(const std::string& s, const std::string& at) {
  if (s == "constant") return SchedulerKind::Constant;
  if (s == "constant_and_cut") return SchedulerKind::ConstantAndCut;
  if (s == "sasa_plus") return SchedulerKind::SasaPlus;
  if (s == "ssls") return SchedulerKind::Ssls;
  if (s == "salsa") return SchedulerKind::Salsa;
  if (s == "slope_only") return SchedulerKind::SlopeOnly;
  throw ConfigError(at + ": unknown scheduler kind '" + s + "'");
}

// Strict object reader: typed getters mark keys as consumed; done() rejects
// anything left over, naming the full dotted path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(path_.empty() ? "config root: expected an object"
                                      : path_ + ": expected an object");
  }

  std::string at(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const char* key) const { return j_.contains(key); }

  double num(const char* key, std::optional<double> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      throw ConfigError(at(key) + ": required field is missing");
    }
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_number())
      throw ConfigError(at(key) + ": expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const char* key,
                       std::optional<std::int64_t> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      throw ConfigError(at(key) + ": required field is missing");
    }
    mark(key);
    const json& v = j_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::fabs(d) < 9.0e15)
        return static_cast<std::int64_t>(d);
    }
    throw ConfigError(at(key) + ": expected an integer");
  }

  bool boolean(const char* key, std::optional<bool> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      throw ConfigError(at(key) + ": required field is missing");
    }
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string str(const char* key,
                  std::optional<std::string> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      throw ConfigError(at(key) + ": required field is missing");
    }
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
    return v.get<std::string>();
  }

  // Scalar (filled to `dim`) or explicit array of length `dim`.
  Vec vec(const char* key, std::size_t dim, double fill_default) {
    if (!has(key)) return Vec(dim, fill_default);
    mark(key);
    const json& v = j_.at(key);
    if (v.is_number()) return Vec(dim, v.get<double>());
    if (v.is_array()) {
      Vec out;
      out.reserve(v.size());
      for (const auto& e : v) {
        if (!e.is_number())
          throw ConfigError(at(key) + ": expected numbers in array");
        out.push_back(e.get<double>());
      }
      if (out.size() != dim)
        throw ConfigError(at(key) + ": expected length " +
                          std::to_string(dim) + ", got " +
                          std::to_string(out.size()));
      return out;
    }
    throw ConfigError(at(key) + ": expected a number or an array");
  }

  std::vector<std::int64_t> int_array(const char* key) {
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key) + ": expected an array");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ConfigError(at(key) + ": expected integers in array");
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  const json& raw(const char* key) {
    if (!has(key)) throw ConfigError(at(key) + ": required field is missing");
    mark(key);
    return j_.at(key);
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!consumed_.count(it.key()))
        throw ConfigError(at(it.key().c_str()) + ": unknown field");
    }
  }

 private:
  void mark(const char* key) { consumed_.insert(key); }

  const json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

ProblemSpec parse_problem(const json& doc) {
  Reader r(doc, "problem");
  ProblemSpec p;
  p.kind = r.str("kind");
  if (p.kind == "noisy_quadratic") {
    std::size_t dim = 0;
    if (r.has("lambda")) {
      const json& lv = r.raw("lambda");
      if (lv.is_array())
        dim = lv.size();
      else
        dim = static_cast<std::size_t>(r.integer("dim"));
      // Re-read through vec() for type checks / scalar fill.
      Reader rl(doc, "problem");
      p.lambda = rl.vec("lambda", dim, 1.0);
      if (r.has("dim")) {
        const auto d = static_cast<std::size_t>(r.integer("dim"));
        if (d != dim)
          throw ConfigError("problem.dim: does not match lambda length");
      }
    } else {
      const auto d = r.integer("dim");
      if (d < 1) throw ConfigError("problem.dim: must be >= 1");
      dim = static_cast<std::size_t>(d);
      const double lo = r.num("lambda_min", 1.0);
      const double hi = r.num("lambda_max", lo);
      if (!(lo > 0.0) || !(hi >= lo))
        throw ConfigError(
            "problem.lambda_min/lambda_max: need 0 < lambda_min <= lambda_max");
      p.lambda.resize(dim);
      for (std::size_t i = 0; i < dim; ++i)
        p.lambda[i] =
            dim == 1 ? lo
                     : lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(dim - 1);
    }
    p.sigma = r.num("sigma", 0.1);
    p.x_star = r.vec("x_star", dim, 0.0);
    p.x0 = r.vec("x0", dim, 1.0);
    p.steps_per_epoch = r.integer("steps_per_epoch", 1000);
    if (p.steps_per_epoch < 1)
      throw ConfigError("problem.steps_per_epoch: must be >= 1");
  } else if (p.kind == "logistic_synthetic" || p.kind == "logistic_file") {
    if (p.kind == "logistic_synthetic") {
      p.p = r.integer("p");
      p.n = r.integer("n");
      if (p.p < 1 || p.n < 1)
        throw ConfigError("problem.p/problem.n: must be >= 1");
      p.gen_seed = static_cast<std::uint64_t>(r.integer("gen_seed", 12345));
    } else {
      p.path = r.str("path");
      p.standardize = r.boolean("standardize", true);
    }
    p.batch = r.integer("batch", 32);
    if (p.batch < 1) throw ConfigError("problem.batch: must be >= 1");
    p.l2 = r.num("l2", 0.0);
    if (!(p.l2 >= 0.0)) throw ConfigError("problem.l2: must be >= 0");
    if (p.kind == "logistic_synthetic") {
      p.x0 = r.vec("x0", static_cast<std::size_t>(p.p), 0.0);
    } else if (r.has("x0")) {
      throw ConfigError(
          "problem.x0: not supported for logistic_file (dimension is only "
          "known after loading); zeros are used");
    }
  } else {
    throw ConfigError("problem.kind: unknown kind '" + p.kind + "'");
  }
  r.done();
  return p;
}

DirectionRule parse_rule(const json& doc) {
  Reader r(doc, "rule");
  DirectionRule rule;
  if (r.has("preset")) {
    const std::string preset = r.str("preset");
    if (preset == "sgd") {
      rule = DirectionRule::sgd();
    } else if (preset == "shb") {
      rule = DirectionRule::shb(r.num("beta"));
    } else if (preset == "nag") {
      rule = DirectionRule::nag(r.num("beta"));
    } else if (preset == "qhm") {
      rule = DirectionRule::qhm(r.num("beta"), r.num("nu"));
    } else {
      throw ConfigError("rule.preset: unknown preset '" + preset + "'");
    }
  } else {
    rule.beta = r.num("beta", 0.0);
    rule.nu = r.num("nu", 0.0);
  }
  r.done();
  try {
    rule.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("rule: ") + e.what());
  }
  return rule;
}

}  // namespace

std::unique_ptr<StochasticProblem> ProblemSpec::make() const {
  if (kind == "noisy_quadratic") {
    return std::make_unique<NoisyQuadratic>(lambda, x_star, sigma,
                                            steps_per_epoch);
  }
  if (kind == "logistic_synthetic") {
    Dataset data = make_synthetic_logistic(static_cast<std::size_t>(p), n,
                                           gen_seed);
    return std::make_unique<LogisticRegression>(std::move(data.features),
                                                std::move(data.labels), batch,
                                                l2);
  }
  if (kind == "logistic_file") {
    Dataset data = load_dataset(path, standardize);
    return std::make_unique<LogisticRegression>(std::move(data.features),
                                                std::move(data.labels), batch,
                                                l2);
  }
  throw ConfigError("problem.kind: unknown kind '" + kind + "'");
}

ResolvedConfig parse_run_config(const json& doc) {
  Reader r(doc, "");
  ResolvedConfig cfg;

  cfg.problem = parse_problem(r.raw("problem"));
  if (r.has("rule"))
    cfg.rule = parse_rule(r.raw("rule"));
  else
    cfg.rule = DirectionRule::sgd();

  const std::string direction = r.str("direction", "qhm");
  if (direction == "qhm") {
    cfg.nag_direct = false;
  } else if (direction == "nag_direct") {
    cfg.nag_direct = true;
  } else {
    throw ConfigError("direction: expected 'qhm' or 'nag_direct'");
  }

  // The problem must exist to derive epoch-aware defaults.
  auto prob = cfg.problem.make();
  const std::int64_t spe = prob->steps_per_epoch();
  if (cfg.problem.kind == "logistic_file") {
    cfg.problem.p = static_cast<std::int64_t>(prob->dim());
    cfg.problem.n = prob->dataset_size();
    cfg.problem.x0 = zeros(prob->dim());
    if (cfg.problem.batch > cfg.problem.n)
      throw ConfigError("problem.batch: exceeds dataset size " +
                        std::to_string(cfg.problem.n));
  }

  // Scheduler.
  {
    Reader s(r.raw("scheduler"), "scheduler");
    cfg.scheduler = scheduler_from_name(s.str("kind"), "scheduler.kind");
    const bool uses_sasa = cfg.scheduler == SchedulerKind::SasaPlus ||
                           cfg.scheduler == SchedulerKind::Salsa ||
                           cfg.scheduler == SchedulerKind::SlopeOnly;
    const bool uses_ssls = cfg.scheduler == SchedulerKind::Ssls ||
                           cfg.scheduler == SchedulerKind::Salsa;

    if (uses_sasa) {
      SasaPlusConfig d = SasaPlusConfig::defaults(spe);
      // The slope-only baseline defaults to watching every loss since its
      // last cut: right after a cut the visible loss trend flattens long
      // before the iterate distribution re-equilibrates, which is exactly
      // the over-aggressive behavior this baseline exists to demonstrate.
      if (cfg.scheduler == SchedulerKind::SlopeOnly) d.theta = 1.0;
      cfg.sasa.n_min = s.integer("n_min", d.n_min);
      cfg.sasa.test_every = s.integer("test_every", d.test_every);
      cfg.sasa.delta = s.num("delta", d.delta);
      cfg.sasa.theta = s.num("theta", d.theta);
      cfg.sasa.tau = s.num("tau", d.tau);
      cfg.sasa.estimator = estimator_from_name(s.str("estimator", "olbm"));
      try {
        cfg.sasa.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("scheduler: ") + e.what());
      }
    }
    if (uses_ssls) {
      SslsConfig d;
      if (prob->dataset_size() > 0)
        d = SslsConfig::defaults(prob->dataset_size(), prob->batch_size());
      else
        d.gamma = std::sqrt(1.0 / static_cast<double>(spe));
      cfg.ssls.c = s.num("c", d.c);
      cfg.ssls.rho_inc = s.num("rho_inc", d.rho_inc);
      cfg.ssls.rho_dec = s.num("rho_dec", d.rho_dec);
      cfg.ssls.max_tries =
          static_cast<int>(s.integer("max_tries", d.max_tries));
      cfg.ssls.gamma = s.num("gamma", d.gamma);
      cfg.ssls.probe_along_direction =
          s.boolean("probe_along_direction", false);
      try {
        cfg.ssls.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("scheduler: ") + e.what());
      }
    }
    if (cfg.scheduler == SchedulerKind::Salsa)
      cfg.slope_enabled = s.boolean("slope_enabled", true);
    if (cfg.scheduler == SchedulerKind::ConstantAndCut) {
      cfg.cut_factor = s.num("cut_factor", 0.1);
      if (!(cfg.cut_factor > 0.0 && cfg.cut_factor < 1.0))
        throw ConfigError("scheduler.cut_factor: must lie in (0, 1)");
      if (s.has("cut_iterations")) {
        cfg.cut_iterations = s.int_array("cut_iterations");
      } else {
        const std::int64_t every = s.integer("cut_every_epochs", 0);
        if (every < 0)
          throw ConfigError("scheduler.cut_every_epochs: must be >= 0");
        if (every > 0) {
          // Materialized below once total_iters is known.
          cfg.cut_iterations.assign(1, -every);  // sentinel, expanded later
        }
      }
    }
    s.done();
  }

  cfg.alpha0 = r.num("alpha0");
  if (!(cfg.alpha0 > 0.0)) throw ConfigError("alpha0: must be positive");

  const bool has_total = r.has("total_iters");
  const bool has_epochs = r.has("epochs");
  if (has_total == has_epochs)
    throw ConfigError("config: exactly one of total_iters or epochs required");
  if (has_total) {
    cfg.total_iters = r.integer("total_iters");
  } else {
    const std::int64_t epochs = r.integer("epochs");
    if (epochs < 1) throw ConfigError("epochs: must be >= 1");
    cfg.total_iters = epochs * spe;
  }
  if (cfg.total_iters < 1) throw ConfigError("total_iters: must be >= 1");

  cfg.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
  cfg.log_every = r.integer("log_every", 1);
  if (cfg.log_every < 1) throw ConfigError("log_every: must be >= 1");
  r.done();

  // Expand the cut_every_epochs sentinel now that total_iters is fixed.
  if (cfg.scheduler == SchedulerKind::ConstantAndCut &&
      cfg.cut_iterations.size() == 1 && cfg.cut_iterations[0] < 0) {
    const std::int64_t every = -cfg.cut_iterations[0] * spe;
    cfg.cut_iterations.clear();
    for (std::int64_t k = every; k < cfg.total_iters; k += every)
      cfg.cut_iterations.push_back(k);
  }
  std::sort(cfg.cut_iterations.begin(), cfg.cut_iterations.end());
  for (std::int64_t k : cfg.cut_iterations)
    if (k < 1 || k > cfg.total_iters)
      throw ConfigError("scheduler.cut_iterations: iteration " +
                        std::to_string(k) + " outside [1, total_iters]");

  return cfg;
}

ResolvedConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like path.to.field=value, got '" +
                      assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // plain string
  }

  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dotpos = path.find('.', pos);
    const std::string key = path.substr(
        pos, dotpos == std::string::npos ? std::string::npos : dotpos - pos);
    if (key.empty())
      throw ConfigError("override path has an empty segment: '" + path + "'");
    if (dotpos == std::string::npos) {
      (*node)[key] = parsed;
      break;
    }
    if (!node->contains(key) || !(*node)[key].is_object())
      (*node)[key] = json::object();
    node = &(*node)[key];
    pos = dotpos + 1;
  }
}

nlohmann::ordered_json ResolvedConfig::to_json() const {
  ordered_json j;
  ordered_json p;
  p["kind"] = problem.kind;
  if (problem.kind == "noisy_quadratic") {
    p["lambda"] = problem.lambda;
    p["x_star"] = problem.x_star;
    p["x0"] = problem.x0;
    p["sigma"] = problem.sigma;
    p["steps_per_epoch"] = problem.steps_per_epoch;
  } else {
    if (problem.kind == "logistic_synthetic") {
      p["p"] = problem.p;
      p["n"] = problem.n;
      p["gen_seed"] = problem.gen_seed;
      p["x0"] = problem.x0;
    } else {
      p["path"] = problem.path;
      p["standardize"] = problem.standardize;
    }
    p["batch"] = problem.batch;
    p["l2"] = problem.l2;
  }
  j["problem"] = p;
  j["rule"] = ordered_json{{"beta", rule.beta}, {"nu", rule.nu}};
  j["direction"] = nag_direct ? "nag_direct" : "qhm";

  ordered_json s;
  s["kind"] = scheduler_name(scheduler);
  const bool uses_sasa = scheduler == SchedulerKind::SasaPlus ||
                         scheduler == SchedulerKind::Salsa ||
                         scheduler == SchedulerKind::SlopeOnly;
  const bool uses_ssls =
      scheduler == SchedulerKind::Ssls || scheduler == SchedulerKind::Salsa;
  if (uses_sasa) {
    s["n_min"] = sasa.n_min;
    s["test_every"] = sasa.test_every;
    s["delta"] = sasa.delta;
    s["theta"] = sasa.theta;
    s["tau"] = sasa.tau;
    s["estimator"] = estimator_name(sasa.estimator);
  }
  if (uses_ssls) {
    s["c"] = ssls.c;
    s["rho_inc"] = ssls.rho_inc;
    s["rho_dec"] = ssls.rho_dec;
    s["max_tries"] = ssls.max_tries;
    s["gamma"] = ssls.gamma;
    s["probe_along_direction"] = ssls.probe_along_direction;
  }
  if (scheduler == SchedulerKind::Salsa) s["slope_enabled"] = slope_enabled;
  if (scheduler == SchedulerKind::ConstantAndCut) {
    s["cut_iterations"] = cut_iterations;
    s["cut_factor"] = cut_factor;
  }
  j["scheduler"] = s;

  j["alpha0"] = alpha0;
  j["total_iters"] = total_iters;
  j["seed"] = seed;
  j["log_every"] = log_every;
  return j;
}

}  // namespace salsa
