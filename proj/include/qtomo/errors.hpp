#pragma once

#include <stdexcept>
#include <string>

namespace qtomo {

// Error categories map one-to-one onto CLI exit codes (2, 2, 3, 4).
enum class ErrorKind { contract, input, infeasible, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A precondition or invariant of an operation was not met by its inputs.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::contract, what) {}
};

/// Malformed or unreadable external input (files, flags).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

/// A reconstruction cannot be carried out with the data given (rank deficiency,
/// empty postselection bins, ...).
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace qtomo
