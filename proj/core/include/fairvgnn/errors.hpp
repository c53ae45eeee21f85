#pragma once

#include <stdexcept>
#include <string>

namespace fairvgnn {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violation of an API precondition (shape mismatch, bad argument).
struct ContractError : Error {
    using Error::Error;
};

/// Bad external input: missing files, malformed rows, invalid config.
struct InputError : Error {
    using Error::Error;
};

/// Numeric failure: non-finite values, divergence.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace fairvgnn
