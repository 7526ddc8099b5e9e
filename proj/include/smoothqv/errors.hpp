#pragma once

#include <stdexcept>
#include <string>

namespace smoothqv {

// Argument outside the mathematical domain of a function (s <= 0, x <= 0, nu out of range).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A sampling design that violates its generating conditions (non-monotone map, coincident sites).
class DesignError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class OrderingAmbiguousError : public DesignError {
public:
  using DesignError::DesignError;
};

// Singular A or B matrix in a lattice cell.
class DegenerateCellError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Zero variation statistic; the ratio objective is undefined.
class DegenerateDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IllConditionedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An (ell, M) pair or search configuration that cannot be used.
class ConfigurationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace smoothqv
