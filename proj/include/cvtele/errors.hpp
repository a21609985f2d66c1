#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cvtele {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible Fock truncations or shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs that have no well-defined normalized state (zero-norm cat, nbar < 0, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant (Hermiticity, positivity, normalization) was violated.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Probability weight lost beyond the Fock cutoff exceeded the configured bound.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling found a density value above its envelope.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Invalid run or channel configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal diagnostics (truncation leakage and the like).
/// Returns the previous handler. The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace cvtele
