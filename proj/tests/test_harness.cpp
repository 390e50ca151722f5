#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "salsa/artifacts.hpp"
#include "salsa/errors.hpp"
#include "salsa/run_config.hpp"
#include "salsa/runner.hpp"
#include "salsa/sweep.hpp"

using namespace salsa;
using nlohmann::json;
using nlohmann::ordered_json;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl =
        (fs::temp_directory_path() / "salsa_test_XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

json quad_doc(std::int64_t total, double alpha0, std::uint64_t seed) {
  return json{
      {"problem",
       {{"kind", "noisy_quadratic"}, {"lambda", {0.5, 1.0}}, {"sigma", 0.3},
        {"steps_per_epoch", 100}}},
      {"scheduler", {{"kind", "constant"}}},
      {"alpha0", alpha0},
      {"total_iters", total},
      {"seed", seed},
  };
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

// --- config parsing ---------------------------------------------------------

TEST_CASE("minimal config fills documented defaults") {
  const json doc = {
      {"problem", {{"kind", "noisy_quadratic"}, {"dim", 3}}},
      {"scheduler", {{"kind", "constant"}}},
      {"alpha0", 0.1},
      {"total_iters", 10},
  };
  const ResolvedConfig cfg = parse_run_config(doc);
  CHECK(cfg.problem.lambda == Vec{1.0, 1.0, 1.0});
  CHECK(cfg.problem.sigma == 0.1);
  CHECK(cfg.problem.x_star == Vec{0.0, 0.0, 0.0});
  CHECK(cfg.problem.x0 == Vec{1.0, 1.0, 1.0});
  CHECK(cfg.problem.steps_per_epoch == 1000);
  CHECK(cfg.rule.beta == 0.0);  // plain SGD when no rule is given
  CHECK(cfg.rule.nu == 0.0);
  CHECK_FALSE(cfg.nag_direct);
  CHECK(cfg.seed == 1);
  CHECK(cfg.log_every == 1);
}

TEST_CASE("lambda grid from dim and endpoints") {
  const json doc = {
      {"problem",
       {{"kind", "noisy_quadratic"}, {"dim", 5}, {"lambda_min", 0.2},
        {"lambda_max", 1.0}}},
      {"scheduler", {{"kind", "constant"}}},
      {"alpha0", 0.1},
      {"total_iters", 10},
  };
  const ResolvedConfig cfg = parse_run_config(doc);
  REQUIRE(cfg.problem.lambda.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(cfg.problem.lambda[i] == doctest::Approx(0.2 + 0.2 * double(i)));

  // dim == 1 takes the lower endpoint
  json one = doc;
  one["problem"]["dim"] = 1;
  CHECK(parse_run_config(one).problem.lambda == Vec{0.2});
}

TEST_CASE("unknown fields are rejected with their dotted path") {
  json doc = quad_doc(10, 0.1, 1);
  doc["problem"]["sigmah"] = 0.2;
  CHECK_THROWS_WITH_AS(parse_run_config(doc),
                       "problem.sigmah: unknown field", ConfigError);

  json doc2 = quad_doc(10, 0.1, 1);
  doc2["scheduler"]["tau"] = 0.1;  // constant scheduler takes no tau
  CHECK_THROWS_WITH_AS(parse_run_config(doc2),
                       "scheduler.tau: unknown field", ConfigError);

  json doc3 = quad_doc(10, 0.1, 1);
  doc3["alpha"] = 0.1;
  CHECK_THROWS_WITH_AS(parse_run_config(doc3), "alpha: unknown field",
                       ConfigError);
}

TEST_CASE("exactly one of total_iters and epochs") {
  json both = quad_doc(10, 0.1, 1);
  both["epochs"] = 2;
  CHECK_THROWS_AS(parse_run_config(both), ConfigError);

  json neither = quad_doc(10, 0.1, 1);
  neither.erase("total_iters");
  CHECK_THROWS_AS(parse_run_config(neither), ConfigError);

  json epochs = quad_doc(10, 0.1, 1);
  epochs.erase("total_iters");
  epochs["epochs"] = 3;
  epochs["problem"]["steps_per_epoch"] = 250;
  CHECK(parse_run_config(epochs).total_iters == 750);
}

TEST_CASE("constant_and_cut expands cut_every_epochs against the horizon") {
  json doc = quad_doc(10, 0.1, 1);
  doc["scheduler"] = {{"kind", "constant_and_cut"}, {"cut_every_epochs", 2}};
  doc.erase("total_iters");
  doc["epochs"] = 5;
  const ResolvedConfig cfg = parse_run_config(doc);  // spe = 100
  CHECK(cfg.cut_iterations == std::vector<std::int64_t>{200, 400});
  CHECK(cfg.cut_factor == 0.1);

  json expl = quad_doc(300, 0.1, 1);
  expl["scheduler"] = {{"kind", "constant_and_cut"},
                       {"cut_iterations", {120, 50}},
                       {"cut_factor", 0.25}};
  const ResolvedConfig c2 = parse_run_config(expl);
  CHECK(c2.cut_iterations == std::vector<std::int64_t>{50, 120});  // sorted

  json bad = expl;
  bad["scheduler"]["cut_iterations"] = {0};
  CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
  bad["scheduler"]["cut_iterations"] = {400};  // past the horizon
  CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
}

TEST_CASE("scheduler defaults derive from the problem's epoch length") {
  json doc = quad_doc(10, 0.1, 1);
  doc["problem"]["steps_per_epoch"] = 400;
  doc["scheduler"] = {{"kind", "sasa_plus"}};
  const ResolvedConfig cfg = parse_run_config(doc);
  CHECK(cfg.sasa.n_min == 400);      // min(1000, spe)
  CHECK(cfg.sasa.test_every == 100); // min(100, spe)
  CHECK(cfg.sasa.delta == 0.05);
  CHECK(cfg.sasa.theta == 0.125);
  CHECK(cfg.sasa.tau == 0.1);
  CHECK(cfg.sasa.estimator == EstimatorKind::OLBM);

  json ld = {
      {"problem",
       {{"kind", "logistic_synthetic"}, {"p", 4}, {"n", 400}, {"batch", 25}}},
      {"scheduler", {{"kind", "ssls"}}},
      {"alpha0", 0.1},
      {"total_iters", 10},
  };
  const ResolvedConfig lc = parse_run_config(ld);
  CHECK(lc.ssls.gamma == doctest::Approx(0.25));  // sqrt(25/400)
  CHECK(lc.ssls.c == 0.05);
  CHECK(lc.ssls.rho_inc == 2.0);
  CHECK(lc.ssls.rho_dec == 0.5);
  CHECK(lc.ssls.max_tries == 2);
}

TEST_CASE("apply_override writes typed values at dotted paths") {
  json doc = quad_doc(10, 0.1, 1);
  apply_override(doc, "problem.sigma=0.25");
  CHECK(doc["problem"]["sigma"] == json(0.25));
  apply_override(doc, "scheduler.kind=sasa_plus");
  CHECK(doc["scheduler"]["kind"] == json("sasa_plus"));
  apply_override(doc, "scheduler.estimator=bm");  // created as a string
  CHECK(doc["scheduler"]["estimator"].is_string());
  apply_override(doc, "problem.lambda=[1,2]");
  CHECK(doc["problem"]["lambda"] == json::array({1, 2}));
  apply_override(doc, "seed=42");
  CHECK(doc["seed"] == json(42));
  CHECK(doc["seed"].is_number_integer());
  apply_override(doc, "fresh.nested.key=true");
  CHECK(doc["fresh"]["nested"]["key"] == json(true));

  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "a..b=5"), ConfigError);
}

TEST_CASE("to_json round trips to a fixed point") {
  const json doc = {
      {"problem",
       {{"kind", "logistic_synthetic"}, {"p", 6}, {"n", 400}, {"batch", 25},
        {"gen_seed", 99}, {"l2", 0.001}}},
      {"rule", {{"preset", "qhm"}, {"beta", 0.9}, {"nu", 0.7}}},
      {"scheduler", {{"kind", "salsa"}, {"tau", 0.2}}},
      {"alpha0", 0.05},
      {"epochs", 2},
      {"seed", 8},
      {"log_every", 4},
  };
  const ResolvedConfig c1 = parse_run_config(doc);
  const ordered_json j1 = c1.to_json();
  const ResolvedConfig c2 = parse_run_config(j1);
  const ordered_json j2 = c2.to_json();
  CHECK(j1.dump() == j2.dump());
  CHECK(c2.rule.beta == 0.9);
  CHECK(c2.rule.nu == 0.7);
  CHECK(c2.sasa.tau == 0.2);
  CHECK(c2.total_iters == 32);  // 2 epochs * ceil(400/25)
  CHECK(c2.ssls.gamma == doctest::Approx(0.25));
  CHECK(c2.slope_enabled);
}

// --- run artifacts ----------------------------------------------------------

TEST_CASE("constant run writes the four artifacts, deterministically") {
  TempDir tmp;
  const ResolvedConfig cfg = [] {
    json doc = quad_doc(300, 0.02, 5);
    doc["log_every"] = 7;
    return parse_run_config(doc);
  }();

  const RunResult res = run_experiment(cfg);
  write_run_artifacts(res, tmp.sub("run_a"));
  for (const char* f :
       {"config.json", "metrics.csv", "events.jsonl", "summary.json"})
    CHECK(fs::exists(fs::path(tmp.sub("run_a")) / f));

  const std::string metrics = slurp(fs::path(tmp.sub("run_a")) / "metrics.csv");
  const auto rows = csv_rows(metrics);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0][0] == "iteration");
  CHECK(rows[0][4] == "alpha");
  CHECK(rows[0][5] == "phase");
  // log_every=7 plus forced first/last rows: 42 multiples + k=1 + k=300
  CHECK(rows.size() - 1 == 44);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][4] == fmt_g17(0.02));  // constant alpha column
    CHECK(rows[i][5] == "adaptive");
  }
  CHECK(slurp(fs::path(tmp.sub("run_a")) / "events.jsonl").empty());

  // independent rerun of the same config: byte-identical artifacts
  const RunResult res2 = run_experiment(cfg);
  write_run_artifacts(res2, tmp.sub("run_b"));
  CHECK(metrics == slurp(fs::path(tmp.sub("run_b")) / "metrics.csv"));
  CHECK(slurp(fs::path(tmp.sub("run_a")) / "config.json") ==
        slurp(fs::path(tmp.sub("run_b")) / "config.json"));
  CHECK(slurp(fs::path(tmp.sub("run_a")) / "events.jsonl") ==
        slurp(fs::path(tmp.sub("run_b")) / "events.jsonl"));

  CHECK(validate_run_dir(tmp.sub("run_a")) == std::nullopt);
}

TEST_CASE("validator flags tampered step-size traces") {
  TempDir tmp;
  const ResolvedConfig cfg = parse_run_config(quad_doc(60, 0.05, 2));
  write_run_artifacts(run_experiment(cfg), tmp.sub("run"));
  REQUIRE(validate_run_dir(tmp.sub("run")) == std::nullopt);

  const fs::path mpath = fs::path(tmp.sub("run")) / "metrics.csv";
  const std::string original = slurp(mpath);

  // double one alpha mid-trace
  auto rows = csv_rows(original);
  rows[rows.size() / 2][4] = fmt_g17(0.1);
  std::string tampered;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      tampered += (i ? "," : "") + r[i];
    tampered += '\n';
  }
  spit(mpath, tampered);
  auto err = validate_run_dir(tmp.sub("run"));
  REQUIRE(err.has_value());
  CHECK(err->find("alpha") != std::string::npos);

  // non-positive alpha
  rows = csv_rows(original);
  rows[2][4] = "-0.05";
  tampered.clear();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      tampered += (i ? "," : "") + r[i];
    tampered += '\n';
  }
  spit(mpath, tampered);
  err = validate_run_dir(tmp.sub("run"));
  REQUIRE(err.has_value());
  CHECK(err->find("non-positive") != std::string::npos);

  spit(mpath, original);
  CHECK(validate_run_dir(tmp.sub("run")) == std::nullopt);
}

TEST_CASE("constant_and_cut logs its cuts and replays cleanly") {
  TempDir tmp;
  json doc = quad_doc(300, 0.02, 3);
  doc["scheduler"] = {{"kind", "constant_and_cut"},
                      {"cut_iterations", {50, 120}},
                      {"cut_factor", 0.25}};
  doc["log_every"] = 50;
  const RunResult res = run_experiment(parse_run_config(doc));
  REQUIRE(res.drops.size() == 2);
  CHECK(res.drops[0].source == "fixed_schedule");
  CHECK(res.drops[0].event.iteration == 50);
  CHECK(res.drops[1].event.iteration == 120);
  CHECK(res.final_alpha == 0.02 * 0.25 * 0.25);

  write_run_artifacts(res, tmp.sub("run"));
  CHECK(validate_run_dir(tmp.sub("run")) == std::nullopt);

  std::ifstream ev(fs::path(tmp.sub("run")) / "events.jsonl");
  std::string line;
  int drops_seen = 0;
  while (std::getline(ev, line)) {
    const json e = json::parse(line);
    CHECK(e.at("type") == "drop");
    CHECK(e.at("source") == "fixed_schedule");
    CHECK(e.at("alpha_new").get<double>() ==
          e.at("alpha_old").get<double>() * 0.25);
    ++drops_seen;
  }
  CHECK(drops_seen == 2);
}

TEST_CASE("sasa_plus run: events replay, estimator spread, plot tables") {
  TempDir tmp;
  json doc = {
      {"problem",
       {{"kind", "noisy_quadratic"}, {"lambda", {1.0}}, {"sigma", 1.0},
        {"steps_per_epoch", 100}}},
      {"rule", {{"preset", "shb"}, {"beta", 0.9}}},
      {"scheduler",
       {{"kind", "sasa_plus"}, {"n_min", 50}, {"test_every", 50},
        {"theta", 1.0}, {"tau", 0.5}}},
      {"alpha0", 0.05},
      {"total_iters", 3000},
      {"seed", 17},
      {"log_every", 10},
  };
  const RunResult res = run_experiment(parse_run_config(doc));
  CHECK(res.drops.size() >= 2);
  for (const auto& d : res.drops) {
    CHECK(d.source == "sasa");
    CHECK(d.event.alpha_new == 0.5 * d.event.alpha_old);
  }
  REQUIRE(res.tests.size() >= 3);

  // The momentum buffer makes consecutive Delta samples positively
  // correlated, so the naive IID estimator underestimates on most windows.
  int olbm_larger = 0;
  for (const auto& t : res.tests)
    if (t.sigma_olbm > t.sigma_iid) ++olbm_larger;
  CHECK(2 * olbm_larger > static_cast<int>(res.tests.size()));

  write_run_artifacts(res, tmp.sub("run"));
  CHECK(validate_run_dir(tmp.sub("run")) == std::nullopt);

  emit_plot_data(tmp.sub("run"));
  const fs::path plots = fs::path(tmp.sub("run")) / "plots";
  const auto dci = csv_rows(slurp(plots / "delta_ci.csv"));
  REQUIRE(dci.size() > 1);
  CHECK(dci[0] == std::vector<std::string>{"iteration", "series", "value"});
  REQUIRE((dci.size() - 1) % 3 == 0);
  for (std::size_t i = 1; i + 2 < dci.size(); i += 3) {
    CHECK(dci[i][1] == "mean");
    CHECK(dci[i + 1][1] == "lower");
    CHECK(dci[i + 2][1] == "upper");
    const double mean = std::stod(dci[i][2]);
    const double lower = std::stod(dci[i + 1][2]);
    const double upper = std::stod(dci[i + 2][2]);
    CHECK(lower <= mean);
    CHECK(mean <= upper);
  }
  const auto var = csv_rows(slurp(plots / "variance_comparison.csv"));
  CHECK(var.size() - 1 == 3 * res.tests.size());
  const auto lr = csv_rows(slurp(plots / "lr_trace.csv"));
  CHECK(lr.size() - 1 == res.rows.size());

  // events are ordered by iteration
  std::ifstream ev(fs::path(tmp.sub("run")) / "events.jsonl");
  std::string line;
  std::int64_t prev = 0;
  while (std::getline(ev, line)) {
    const auto k = json::parse(line).at("iteration").get<std::int64_t>();
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("plot tables are header-only when a run never tests") {
  TempDir tmp;
  write_run_artifacts(run_experiment(parse_run_config(quad_doc(40, 0.05, 4))),
                      tmp.sub("run"));
  emit_plot_data(tmp.sub("run"));
  const fs::path plots = fs::path(tmp.sub("run")) / "plots";
  CHECK(slurp(plots / "delta_ci.csv") == "iteration,series,value\n");
  CHECK(slurp(plots / "variance_comparison.csv") == "iteration,series,value\n");
  CHECK(csv_rows(slurp(plots / "loss.csv")).size() == 2 * 40 + 1);
}

TEST_CASE("fmt_g17 round trips doubles exactly") {
  for (double v : {1.0 / 3.0, 0.1, 1e-300, 3.141592653589793, 5.0e15}) {
    CHECK(std::stod(fmt_g17(v)) == v);
  }
  CHECK(fmt_g17(0.1) == "0.10000000000000001");
  CHECK(fmt_g17(2.0) == "2");
}

// --- sweeps -----------------------------------------------------------------

TEST_CASE("two-point sweep writes point dirs, seeds, and sweep.csv") {
  TempDir tmp;
  ordered_json doc;
  doc["base"] = quad_doc(200, 0.01, 5);
  doc["grid"] = {{"alpha0", {0.01, 0.02}}};
  const auto results = run_sweep(doc, tmp.sub("sweep"), 1);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK(r.ok);
    CHECK(r.error.empty());
    CHECK(fs::exists(fs::path(r.run_dir) / "metrics.csv"));
  }
  CHECK(results[0].run_dir == tmp.sub("sweep") + "/point_0000");
  CHECK(results[1].run_dir == tmp.sub("sweep") + "/point_0001");

  // seed rule: base.seed + index when the grid does not sweep seed
  const json c0 = json::parse(
      slurp(fs::path(results[0].run_dir) / "config.json"));
  const json c1 = json::parse(
      slurp(fs::path(results[1].run_dir) / "config.json"));
  CHECK(c0.at("seed") == json(5));
  CHECK(c1.at("seed") == json(6));
  CHECK(c0.at("alpha0") == json(0.01));
  CHECK(c1.at("alpha0") == json(0.02));

  const auto rows = csv_rows(slurp(fs::path(tmp.sub("sweep")) / "sweep.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "index");
  CHECK(rows[0][1] == "alpha0");
  CHECK(rows[1][0] == "0");
  CHECK(rows[1][1] == "0.01");
  CHECK(rows[1][2] == "ok");
  CHECK(rows[2][1] == "0.02");
}

TEST_CASE("single-point sweep reproduces a direct run byte for byte") {
  TempDir tmp;
  ordered_json doc;
  doc["base"] = quad_doc(150, 0.01, 3);
  doc["grid"] = {{"alpha0", {0.05}}};
  const auto results = run_sweep(doc, tmp.sub("sweep"), 1);
  REQUIRE(results.size() == 1);
  REQUIRE(results[0].ok);

  json direct = quad_doc(150, 0.05, 3);  // same seed: base.seed + 0
  write_run_artifacts(run_experiment(parse_run_config(direct)),
                      tmp.sub("direct"));
  CHECK(slurp(fs::path(results[0].run_dir) / "metrics.csv") ==
        slurp(fs::path(tmp.sub("direct")) / "metrics.csv"));
}

TEST_CASE("sweep grid failures are recorded without stopping the sweep") {
  TempDir tmp;
  ordered_json doc;
  doc["base"] = quad_doc(50, 0.01, 1);
  doc["grid"] = {{"alpha0", {0.01, -1.0}}};  // second point is invalid
  const auto results = run_sweep(doc, tmp.sub("sweep"), 1);
  REQUIRE(results.size() == 2);
  CHECK(results[0].ok);
  CHECK_FALSE(results[1].ok);
  CHECK(results[1].error.find("alpha0") != std::string::npos);
  const auto rows = csv_rows(slurp(fs::path(tmp.sub("sweep")) / "sweep.csv"));
  CHECK(rows[2][2] == "error");
}

TEST_CASE("malformed sweep configs are rejected") {
  CHECK_THROWS_AS(run_sweep(ordered_json::object(), "/tmp/unused", 1),
                  ConfigError);
  ordered_json no_grid;
  no_grid["base"] = quad_doc(10, 0.1, 1);
  CHECK_THROWS_AS(run_sweep(no_grid, "/tmp/unused", 1), ConfigError);
  ordered_json empty_list;
  empty_list["base"] = quad_doc(10, 0.1, 1);
  empty_list["grid"] = {{"alpha0", json::array()}};
  CHECK_THROWS_AS(run_sweep(empty_list, "/tmp/unused", 1), ConfigError);
  ordered_json stray;
  stray["base"] = quad_doc(10, 0.1, 1);
  stray["grid"] = {{"alpha0", {0.1}}};
  stray["extra"] = 1;
  CHECK_THROWS_AS(run_sweep(stray, "/tmp/unused", 1), ConfigError);
}

// --- command-line interface -------------------------------------------------

#ifdef SALSA_OPT_BIN

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SALSA_OPT_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace

TEST_CASE("cli drives run, check, plot-data, and sweep end to end") {
  TempDir tmp;
  spit(tmp.path / "cfg.json", quad_doc(120, 0.02, 7).dump(2));

  CHECK(run_cli("run --config " + tmp.sub("cfg.json") + " --out " +
                tmp.sub("out")) == 0);
  for (const char* f :
       {"config.json", "metrics.csv", "events.jsonl", "summary.json"})
    CHECK(fs::exists(fs::path(tmp.sub("out")) / f));

  CHECK(run_cli("check --run " + tmp.sub("out")) == 0);
  CHECK(run_cli("plot-data --run " + tmp.sub("out")) == 0);
  CHECK(fs::exists(fs::path(tmp.sub("out")) / "plots" / "lr_trace.csv"));

  // --override reaches the resolved config
  CHECK(run_cli("run --config " + tmp.sub("cfg.json") +
                " --override problem.sigma=0.5 --override seed=9 --out " +
                tmp.sub("out2")) == 0);
  const json c = json::parse(slurp(fs::path(tmp.sub("out2")) / "config.json"));
  CHECK(c.at("problem").at("sigma") == json(0.5));
  CHECK(c.at("seed") == json(9));

  ordered_json sweep_doc;
  sweep_doc["base"] = quad_doc(60, 0.01, 2);
  sweep_doc["grid"] = {{"alpha0", {0.01, 0.02}}};
  spit(tmp.path / "sweep.json", sweep_doc.dump(2));
  CHECK(run_cli("sweep --config " + tmp.sub("sweep.json") + " --out " +
                tmp.sub("sw") + " --threads 1") == 0);
  CHECK(fs::exists(fs::path(tmp.sub("sw")) / "sweep.csv"));
  CHECK(fs::exists(fs::path(tmp.sub("sw")) / "point_0001" / "metrics.csv"));
}

TEST_CASE("cli reports config errors with a nonzero exit") {
  TempDir tmp;
  json bad = quad_doc(10, 0.1, 1);
  bad["problem"]["kind"] = "cubic";
  spit(tmp.path / "bad.json", bad.dump());
  CHECK(run_cli("run --config " + tmp.sub("bad.json") + " --out " +
                tmp.sub("out")) == 1);
  CHECK(run_cli("run --config " + tmp.sub("missing.json") + " --out " +
                tmp.sub("out")) == 1);
  CHECK(run_cli("check --run " + tmp.sub("not_a_run")) != 0);
}

#endif  // SALSA_OPT_BIN
