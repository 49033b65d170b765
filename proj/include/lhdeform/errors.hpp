#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lhdeform {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function, weight or map was evaluated outside its domain.
/// Vector fields raise this to signal a domain exit to the integrator.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::vector<double> point)
      : Error(what), point_(std::move(point)) {}
  explicit DomainError(const std::string& what) : Error(what) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// The discriminant under a superposition square root is negative.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, double discriminant)
      : Error(what), discriminant_(discriminant) {}
  double discriminant() const noexcept { return discriminant_; }

 private:
  double discriminant_;
};

/// A superposition rule hit one of its vanishing denominators.
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// The solved exponential of a deformed rule is not positive.
class OutOfBranch : public Error {
 public:
  using Error::Error;
};

/// Query outside the time span of a trajectory.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace lhdeform
