#pragma once

// Run-directory artifacts:
//   config.json   resolved configuration (re-parseable, deterministic)
//   metrics.csv   per-iteration records, byte-deterministic for a given
//                 (config, seed); floats printed with %.17g
//   events.jsonl  statistical tests, step-size drops, the phase switch
//   summary.json  final numbers; the only file carrying a timestamp
//
// plus derived plot tables under plots/ and a validator that replays the
// logged events against the step-size trace.

#include <optional>
#include <string>

#include "salsa/runner.hpp"

namespace salsa {

void write_run_artifacts(const RunResult& res, const std::string& dir);

// Writes plots/lr_trace.csv, plots/loss.csv, plots/delta_ci.csv and
// plots/variance_comparison.csv from an existing run directory, in tidy
// (iteration, series, value) form. Missing inputs raise ParseError naming
// the file; runs without test events yield header-only tables.
void emit_plot_data(const std::string& run_dir);

// Replays events.jsonl against the alpha column of metrics.csv: outside
// warmup the step size must change only at logged drops and by exactly the
// logged factors; inside warmup consecutive logged steps must respect the
// line-search bracket. Returns std::nullopt when consistent, else a
// description of the first violation.
std::optional<std::string> validate_run_dir(const std::string& run_dir);

// %.17g formatting used for all numeric CSV output.
std::string fmt_g17(double v);

}  // namespace salsa
