#pragma once

#include <stdexcept>

namespace salsa {

// Invalid configuration (bad hyperparameter range, unknown config field,
// batch larger than dataset, ...). The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A statistical routine was handed fewer samples than it needs. Inside
// the controllers this is prevented by the window gates; it escapes only
// when a caller invokes an estimator or test directly on a short window.
struct NotEnoughSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A closed-form stationary quantity was requested for a step size at which
// the iteration diverges (e.g. alpha * lambda >= 2 on a quadratic).
struct UnstableStep : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (dataset files, config JSON). Messages name the
// offending location (line or field path).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace salsa
