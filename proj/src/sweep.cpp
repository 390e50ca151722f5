#include "salsa/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "salsa/artifacts.hpp"
#include "salsa/errors.hpp"
#include "salsa/run_config.hpp"
#include "salsa/runner.hpp"

namespace salsa {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void set_by_path(json& doc, const std::string& path, const json& value) {
  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dotpos = path.find('.', pos);
    const std::string key = path.substr(
        pos, dotpos == std::string::npos ? std::string::npos : dotpos - pos);
    if (key.empty())
      throw ConfigError("grid: path has an empty segment: '" + path + "'");
    if (dotpos == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object())
      (*node)[key] = json::object();
    node = &(*node)[key];
    pos = dotpos + 1;
  }
}

int default_threads() {
  if (const char* env = std::getenv("SALSA_OPT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError(
          "SALSA_OPT_THREADS must be a positive integer, got '" +
          std::string(env) + "'");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string point_dir_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%04lld",
                static_cast<long long>(index));
  return buf;
}

}  // namespace

std::vector<SweepPointResult> run_sweep(const ordered_json& doc,
                                        const std::string& out_dir,
                                        int threads) {
  if (!doc.is_object()) throw ConfigError("sweep config: expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "base" && it.key() != "grid")
      throw ConfigError("sweep config: unknown field '" + it.key() + "'");
  if (!doc.contains("base") || !doc.at("base").is_object())
    throw ConfigError("sweep config: 'base' object is required");
  if (!doc.contains("grid") || !doc.at("grid").is_object())
    throw ConfigError("sweep config: 'grid' object is required");

  const json base = doc.at("base");
  std::vector<std::string> keys;
  std::vector<std::vector<json>> values;
  bool seed_swept = false;
  for (auto it = doc.at("grid").begin(); it != doc.at("grid").end(); ++it) {
    if (!it.value().is_array() || it.value().empty())
      throw ConfigError("grid." + it.key() + ": expected a non-empty array");
    keys.push_back(it.key());
    values.emplace_back(it.value().begin(), it.value().end());
    if (it.key() == "seed") seed_swept = true;
  }
  if (keys.empty()) throw ConfigError("sweep config: grid has no keys");

  std::int64_t npoints = 1;
  for (const auto& v : values) {
    npoints *= static_cast<std::int64_t>(v.size());
    if (npoints > 100000) throw ConfigError("sweep config: grid too large");
  }
  const std::int64_t base_seed = base.value("seed", 1);

  // Expand points up front (validates configs before any run starts).
  struct Point {
    std::int64_t index;
    json doc;
    std::vector<std::pair<std::string, std::string>> settings;
  };
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(npoints));
  for (std::int64_t idx = 0; idx < npoints; ++idx) {
    Point pt;
    pt.index = idx;
    pt.doc = base;
    std::int64_t rem = idx;
    for (std::size_t d = keys.size(); d-- > 0;) {
      const auto m = static_cast<std::int64_t>(values[d].size());
      const json& v = values[d][static_cast<std::size_t>(rem % m)];
      rem /= m;
      set_by_path(pt.doc, keys[d], v);
      pt.settings.emplace_back(keys[d], v.dump());
    }
    std::reverse(pt.settings.begin(), pt.settings.end());
    if (!seed_swept) pt.doc["seed"] = base_seed + idx;
    points.push_back(std::move(pt));
  }

  fs::create_directories(out_dir);
  std::vector<SweepPointResult> results(points.size());

  int nthreads = threads > 0 ? threads : default_threads();
  nthreads = static_cast<int>(
      std::min<std::int64_t>(nthreads, static_cast<std::int64_t>(points.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      SweepPointResult& r = results[i];
      r.index = points[i].index;
      r.settings = points[i].settings;
      r.run_dir = (fs::path(out_dir) / point_dir_name(r.index)).string();
      try {
        const ResolvedConfig cfg = parse_run_config(points[i].doc);
        const RunResult run = run_experiment(cfg);
        write_run_artifacts(run, r.run_dir);
        r.ok = true;
        r.final_alpha = run.final_alpha;
        r.final_loss_smooth = run.final_loss_smooth;
        r.objective_final = run.objective_final;
        r.n_drops = static_cast<std::int64_t>(run.drops.size());
        r.switch_iteration = run.switch_iteration;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  write_sweep_csv(results, keys, out_dir);
  return results;
}

void write_sweep_csv(const std::vector<SweepPointResult>& results,
                     const std::vector<std::string>& grid_keys,
                     const std::string& out_dir) {
  std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
  if (!out)
    throw ParseError((fs::path(out_dir) / "sweep.csv").string() +
                     ": cannot open for writing");
  out << "index";
  for (const std::string& k : grid_keys) out << ',' << k;
  out << ",status,final_alpha,final_loss_smooth,objective_final,n_drops,"
         "switch_iteration,run_dir,error\n";
  for (const SweepPointResult& r : results) {
    out << r.index;
    for (const auto& [key, val] : r.settings) {
      (void)key;
      out << ',' << val;
    }
    if (r.ok) {
      out << ",ok," << fmt_g17(r.final_alpha) << ','
          << fmt_g17(r.final_loss_smooth) << ',' << fmt_g17(r.objective_final)
          << ',' << r.n_drops << ',' << r.switch_iteration << ',' << r.run_dir
          << ',';
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << ",error,,,,,," << r.run_dir << ',' << msg;
    }
    out << '\n';
  }
}

}  // namespace salsa
