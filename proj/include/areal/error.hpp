#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace areal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands that belong to a different ring than the context they were passed to.
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidRingSpec : public Error {
 public:
  using Error::Error;
};

class NonInvertible : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An enumeration would visit more items than the configured budget allows.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, std::uint64_t required, std::uint64_t budget)
      : Error(what + ": requires " + std::to_string(required) + " visits, budget is " +
              std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

/// A malformed experiment or sweep description.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace areal
