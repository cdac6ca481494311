#ifndef INTENS_ERROR_HPP
#define INTENS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace intens {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad parameter values, unknown names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// API misuse (mismatched sizes, utterance not in alternative set).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Optimizer could not produce a result.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace intens

#endif
