#pragma once

#include <stdexcept>
#include <string>

namespace ndpoly {

// Bad user input: out-of-domain values, malformed parameters or documents.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched shapes between related quantities (bands vs. space, weights vs. features).
struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

// Missing or malformed columns / fields in an input table or document.
struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};

// An iterative solver hit its iteration cap before reaching tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ndpoly
