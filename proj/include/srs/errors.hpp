#pragma once

#include <stdexcept>
#include <string>

namespace srs {

/// Invalid dimensions, sizes or configuration values.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (e.g. log of zero).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values produced during an iteration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric is undefined for the given input (e.g. zero reconstruction).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srs
