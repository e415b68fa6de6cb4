#pragma once

#include <stdexcept>
#include <string>

namespace npiv {

// Invalid configuration (bad parameters, violated preconditions of a setup).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shape or dimension mismatch.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace npiv
