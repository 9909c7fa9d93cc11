#pragma once

#include <stdexcept>
#include <string>

namespace cfe {

// Error taxonomy shared across the library. Each failure mode named in an
// operation contract maps to exactly one of these.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or index disagreement between samples, schemas, or network heads.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A sample or model definition violates its schema (bad feature index,
// out-of-range category code, missing cardinality, ...).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or unknown dataset / config keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An object was used before it was put into a usable state.
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; message names the offending sample/line.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A predictive model failed to produce a usable prediction.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfe
