#pragma once

#include <stdexcept>
#include <string>

namespace bspinn {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a precondition.
struct InvalidArgument : Error {
  using Error::Error;
};

/// A non-finite value appeared where a finite one is required.
struct NumericError : Error {
  using Error::Error;
};

/// Malformed text input (config, arch string, checkpoint, CSV).
struct ParseError : Error {
  using Error::Error;
};

/// Filesystem-level failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace bspinn
