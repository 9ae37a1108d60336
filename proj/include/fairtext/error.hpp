#pragma once

#include <stdexcept>
#include <string>

namespace fairtext {

// Error taxonomy. Each stage throws the narrowest type that applies so
// callers (and the CLI) can name the failing stage.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fairness rate that cannot be computed (e.g. a group with no actual
// negatives has no false-positive rate).
struct MetricUndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric input that violates a documented precondition (e.g. an
// unnormalized distribution).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fairtext
