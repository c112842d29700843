#pragma once

#include <stdexcept>
#include <string>

namespace hlweak {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature exhausted its subdivision budget before reaching the
/// requested tolerance.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sphere/ball intersection that is not a proper cap (tangency, containment
/// or no intersection).
class DegenerateCapError : public DomainError {
 public:
  enum class Kind { kTangent, kSphereInsideBall, kDisjoint };

  DegenerateCapError(Kind kind, const std::string& what)
      : DomainError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// The growth ratio h_u(R) is undefined because mu(B(0, uR)) = 0.
class UndefinedGrowthError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The test function chi_{B(0, vR)} has zero mass.
class EmptyTestFunctionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A construction's growth hypothesis failed on the sampling grid.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(std::string inequality, const std::string& what)
      : std::runtime_error(what), inequality_(std::move(inequality)) {}

  /// Which inequality failed ("sup", "limsup" or "r1").
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

/// The tail of h_u(R) did not settle, so the limsup cannot be estimated.
class InconclusiveHypothesisError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

}  // namespace hlweak
