#include "lhdeform/coefficients.hpp"

#include <cmath>

#include "lhdeform/errors.hpp"

namespace lhdeform {

namespace {

struct TermValue {
  double t;
  double operator()(const term::Constant& c) const { return c.c; }
  double operator()(const term::Monomial& m) const {
    double v = m.c;
    for (int k = 0; k < m.power; ++k) v *= t;
    return v;
  }
  double operator()(const term::Sinusoid& s) const { return s.c * std::sin(s.omega * t + s.phase); }
  double operator()(const term::Exponential& e) const { return e.c * std::exp(e.rate * t); }
};

}  // namespace

CoefficientSpec::CoefficientSpec(std::vector<CoefficientTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (const auto* m = std::get_if<term::Monomial>(&t); m && m->power < 0)
      throw Error("monomial power must be a nonnegative integer");
  }
}

double CoefficientSpec::operator()(double t) const {
  double sum = 0.0;
  for (const auto& term : terms_) sum += std::visit(TermValue{t}, term);
  return sum;
}

double eval_coefficient(const CoefficientSpec& spec, double t) { return spec(t); }

CoefficientSpec scaled(const CoefficientSpec& spec, double factor) {
  std::vector<CoefficientTerm> terms = spec.terms();
  for (auto& term : terms) std::visit([factor](auto& t) { t.c *= factor; }, term);
  return CoefficientSpec(std::move(terms));
}

}  // namespace lhdeform
