#pragma once

#include <stdexcept>

namespace semprobe {

/// Base type for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text: embedding files, norm TSVs, corpora, model files.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid but degenerate data, e.g. an empty vocabulary or an
/// empty embedding/norms overlap. The CLI maps this to exit code 2.
struct DataError : Error {
  using Error::Error;
};

/// Optimization failure: non-finite loss or gradient.
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace semprobe
