#pragma once

#include <stdexcept>
#include <string>

namespace ssr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. The CLI maps this to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-convergence, degenerate objective,
/// vanishing baseline). The CLI maps this to exit status 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssr
