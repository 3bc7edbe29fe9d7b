#pragma once

#include <stdexcept>
#include <string>

namespace chaosgan {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trace or manifest I/O failure; the message names the file and field.
class TraceError : public Error {
 public:
  using Error::Error;
};

/// A finite latent source ran out of rows.
class SourceExhausted : public Error {
 public:
  using Error::Error;
};

/// Tensor or image dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or gradient during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input.
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or malformed config/CSV file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Model file is corrupt, truncated or from an unknown version.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaosgan
