#pragma once

// Grid sweeps: a base run config plus named value lists expands to the
// cartesian product; points run independently (optionally in parallel) into
// out_dir/point_NNNN, and a joined sweep.csv summarizes the results.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace salsa {

struct SweepPointResult {
  std::int64_t index = 0;
  std::vector<std::pair<std::string, std::string>> settings;  // path, value
  std::string run_dir;
  bool ok = false;
  std::string error;
  double final_alpha = 0.0;
  double final_loss_smooth = 0.0;
  double objective_final = 0.0;
  std::int64_t n_drops = 0;
  std::int64_t switch_iteration = -1;
};

// Parses {"base": {...}, "grid": {"dotted.path": [v, ...], ...}}. Points are
// expanded with the last grid key varying fastest. Unless the grid itself
// sweeps "seed", point i runs with seed base.seed + i. `threads` <= 0 picks
// a default from SALSA_OPT_THREADS or the hardware. Individual failures are
// recorded and do not stop the sweep.
std::vector<SweepPointResult> run_sweep(const nlohmann::ordered_json& doc,
                                        const std::string& out_dir,
                                        int threads);

// Writes out_dir/sweep.csv from the results (deterministic row order).
void write_sweep_csv(const std::vector<SweepPointResult>& results,
                     const std::vector<std::string>& grid_keys,
                     const std::string& out_dir);

}  // namespace salsa
