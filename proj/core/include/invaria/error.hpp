#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invaria {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class UnboundSymbol : public EvalError {
 public:
  explicit UnboundSymbol(std::string name)
      : EvalError("unbound symbol '" + name + "'"), name_(std::move(name)) {}

  const std::string& symbol() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Floating-point failure during a numeric computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, double t) : NumericError(what), t_(t) {}

  double time() const noexcept { return t_; }

 private:
  double t_;
};

class NoSettleError : public NumericError {
 public:
  NoSettleError(const std::string& what, double residual)
      : NumericError(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Residual fell between the invariant and not-invariant thresholds.
class UndecidedError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace invaria
