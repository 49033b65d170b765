#pragma once

#include <variant>
#include <vector>

namespace lhdeform {

namespace term {
struct Constant {
  double c = 0.0;
};
/// c * t^power, power >= 0.
struct Monomial {
  double c = 0.0;
  int power = 0;
};
/// c * sin(omega * t + phase)
struct Sinusoid {
  double c = 0.0;
  double omega = 1.0;
  double phase = 0.0;
};
/// c * exp(rate * t)
struct Exponential {
  double c = 0.0;
  double rate = 0.0;
};
}  // namespace term

using CoefficientTerm = std::variant<term::Constant, term::Monomial, term::Sinusoid, term::Exponential>;

/// A t-dependent coefficient given as a sum of primitive terms.
/// The empty sum is identically zero.
class CoefficientSpec {
 public:
  CoefficientSpec() = default;
  explicit CoefficientSpec(std::vector<CoefficientTerm> terms);

  static CoefficientSpec zero() { return {}; }
  static CoefficientSpec constant(double c) { return CoefficientSpec({term::Constant{c}}); }

  double operator()(double t) const;
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<CoefficientTerm>& terms() const noexcept { return terms_; }

 private:
  std::vector<CoefficientTerm> terms_;
};

double eval_coefficient(const CoefficientSpec& spec, double t);

/// factor * spec, term by term.
CoefficientSpec scaled(const CoefficientSpec& spec, double factor);

}  // namespace lhdeform
