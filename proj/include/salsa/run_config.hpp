#pragma once

// Run configuration: strict JSON schema -> resolved, fully materialized
// config. Unknown fields are rejected with their dotted path, every default
// is filled in explicitly, and the resolved form serializes back to JSON so
// a run directory records exactly what was executed.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "salsa/optim.hpp"
#include "salsa/problems.hpp"
#include "salsa/salsa_controller.hpp"
#include "salsa/sasa_plus.hpp"
#include "salsa/ssls.hpp"

namespace salsa {

enum class SchedulerKind {
  Constant,
  ConstantAndCut,
  SasaPlus,
  Ssls,
  Salsa,
  SlopeOnly,
};

const char* scheduler_name(SchedulerKind k);

struct ProblemSpec {
  std::string kind;  // noisy_quadratic | logistic_synthetic | logistic_file

  // noisy_quadratic
  Vec lambda;
  Vec x_star;
  double sigma = 0.1;
  std::int64_t steps_per_epoch = 1000;

  // logistic_*
  std::int64_t p = 0;
  std::int64_t n = 0;
  std::int64_t batch = 32;
  double l2 = 0.0;
  std::uint64_t gen_seed = 12345;
  bool standardize = true;
  std::string path;

  // both
  Vec x0;

  std::unique_ptr<StochasticProblem> make() const;
};

struct ResolvedConfig {
  ProblemSpec problem;
  DirectionRule rule;
  bool nag_direct = false;

  SchedulerKind scheduler = SchedulerKind::Constant;
  SasaPlusConfig sasa;                  // sasa_plus | slope_only | salsa
  SslsConfig ssls;                      // ssls | salsa
  bool slope_enabled = true;            // salsa
  std::vector<std::int64_t> cut_iterations;  // constant_and_cut
  double cut_factor = 0.1;

  double alpha0 = 0.1;
  std::int64_t total_iters = 0;
  std::uint64_t seed = 1;
  std::int64_t log_every = 1;

  nlohmann::ordered_json to_json() const;
};

// Parses and validates a config document. Throws ConfigError with a dotted
// field path on unknown fields, type mismatches, and bad values.
ResolvedConfig parse_run_config(const nlohmann::json& doc);
ResolvedConfig load_run_config(const std::string& path);

// Applies one "dotted.path=value" override to a raw JSON document; the value
// is parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace salsa
