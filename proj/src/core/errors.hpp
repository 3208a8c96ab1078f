#pragma once

#include <stdexcept>
#include <string>

namespace hiermc {

// Argument violates a mathematical domain (sd <= 0, x outside support, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Dimension / size mismatch between containers that must agree.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally invalid data (bad site index, duplicate site, empty input, ...).
struct DataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation produced or received a non-finite value where one is not allowed.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sampler could not produce a usable result (init failure, adaptation failure).
// `chain` is the zero-based chain index, or -1 when not chain-specific.
struct SamplingError : std::runtime_error {
  explicit SamplingError(const std::string& msg, int chain_index = -1)
      : std::runtime_error(chain_index >= 0
                               ? "chain " + std::to_string(chain_index) + ": " + msg
                               : msg),
        chain(chain_index) {}
  int chain;
};

}  // namespace hiermc
