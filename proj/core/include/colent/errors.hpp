#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace colent {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent input data: mismatched spaces, bad indices, malformed documents.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A family of cell sets fails to cover the ambient space.
class CoveringError : public Error {
 public:
  CoveringError(const std::string& what, std::size_t cell)
      : Error(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// No refinement was found within the colour budget. `proven` is false when
/// the search was heuristic or ran out of budget.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::size_t witness_cell, bool proven = true)
      : Error(what), witness_cell_(witness_cell), proven_(proven) {}
  std::size_t witness_cell() const noexcept { return witness_cell_; }
  bool proven() const noexcept { return proven_; }

 private:
  std::size_t witness_cell_;
  bool proven_;
};

/// A dynamical construction reached past the truncation depth of a model.
class DepthExhaustedError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition was measured and found violated.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double measured)
      : Error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// A problem exceeds a configured enumeration cap.
class CapError : public Error {
 public:
  using Error::Error;
};

/// A model would exceed the configured memory cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A checked inequality failed on solver output.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace colent
