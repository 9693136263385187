#pragma once

#include <stdexcept>
#include <string>

namespace docpack {

// Exception families map onto CLI exit codes (see ExitCode in commands.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Judge endpoint could not be reached or answered with a non-retryable error.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace docpack
