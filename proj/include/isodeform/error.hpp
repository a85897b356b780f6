#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isodeform {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched jet sizes, matrix shapes, or index out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A function evaluated outside its domain (log of a non-positive value, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double offending)
      : Error(what), offending_(offending) {}
  double offending() const { return offending_; }

 private:
  double offending_;
};

/// Malformed DSL text or scene file. `offset` is a byte offset (DSL) or a
/// 1-based line number (scene files); see the thrower.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A hypothesis of the theory does not hold: degenerate immersion, singular Q,
/// insufficient rank of the shape operator.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Input data fails a checked constraint (self-adjointness, the gradient
/// relation between g and h, closedness of a 1-form, kernel rank mismatch).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Singular linear systems, quadrature that does not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace isodeform
