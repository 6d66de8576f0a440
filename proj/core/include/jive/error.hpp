#pragma once

#include <stdexcept>
#include <string>

namespace jive {

/// Invalid input: shapes, ranks, configuration values.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File system or parse failure while reading/writing matrices and configs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a result (e.g. non-finite input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jive
