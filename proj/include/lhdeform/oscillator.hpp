#pragma once

// The oscillator Lie-Hamilton system on the plane,
//   dx/dt = b1(t) + b3(t) x,   dy/dt = b2(t) - b3(t) y,
// its book-algebra restriction (b1 = 0), the constants of motion of three
// copies and the two superposition rules that recover the first copy.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lhdeform/coefficients.hpp"
#include "lhdeform/symplectic.hpp"

namespace lhdeform {

struct H4Coefficients {
  CoefficientSpec b1, b2, b3;
  CoefficientSpec b0;

  /// Book-algebra restriction: b1 identically zero.
  bool is_book() const noexcept { return b1.empty(); }
};

enum class Branch : int { plus = 1, minus = -1 };

inline double sign(Branch b) noexcept { return static_cast<double>(static_cast<int>(b)); }
inline Branch opposite(Branch b) noexcept { return b == Branch::plus ? Branch::minus : Branch::plus; }

/// Values of the three constants a superposition rule is solved from.
/// k1 = F2(copies 1,2), k = F3, k3 = right constant of copies (2,3).
struct SuperpositionConstants {
  double k1 = 0.0;
  double k = 0.0;
  double k3 = 0.0;
  Branch branch = Branch::plus;
};

/// Half-width of a branch pair, within which the two branches coincide.
inline constexpr double kBranchAmbiguity = 1e-10;

namespace h4 {

/// (h1, h2, h3, h0) = (y, -x, xy, 1).
std::array<double, 4> hamiltonians(const PhasePoint& p);

/// Index 0..3 selects h1, h2, h3, h0.
ScalarField hamiltonian(int index);

std::array<double, 2> rhs(double t, const PhasePoint& p, const H4Coefficients& c);
VectorField vector_field(H4Coefficients c);

/// Three independent copies of the system on (R^2)^3.
VectorField prolonged_field(H4Coefficients c);

/// Generator fields X1 = d/dx, X2 = d/dy, X3 = x d/dx - y d/dy (index 1..3).
VectorField generator(int index);

/// (x1 - x2)(y1 - y2)
double f2(const PhasePoint& p1, const PhasePoint& p2);
/// Sum over pairs i < j of (x_i - x_j)(y_i - y_j).
double f3(const PhasePoint& p1, const PhasePoint& p2, const PhasePoint& p3);

enum class Permuted { F13, F23 };
/// F13 = (x3 - x2)(y3 - y2); F23 = (x1 - x3)(y1 - y3).
double f2_perm(const PhasePoint& p1, const PhasePoint& p2, const PhasePoint& p3, Permuted which);

/// The same constants as fields on a three-copy point.
ScalarField f2_field();
ScalarField f3_field();
ScalarField f2_perm_field(Permuted which);

/// (k - 2(k1 + k3))^2 - 4 k1 k3.
double discriminant(double k1, double k, double k3);

/// B = sqrt(discriminant). Round-off negatives above -1e-12 * scale are
/// taken as 0; anything below throws ConstraintViolation.
double branch_root(double k1, double k, double k3);

/// First copy from copies 2 and 3. k3 is recomputed from (p2, p3); the
/// stored sc.k3 is ignored. Throws ConstraintViolation or SingularConfiguration.
PhasePoint superpose(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc);

/// Older form in terms of k1, k2 = F23 and k3 = F13 (recomputed from p2, p3).
PhasePoint superpose_legacy(const PhasePoint& p2, const PhasePoint& p3, double k1, double k2,
                            Branch branch);

}  // namespace h4

/// Branch whose reconstruction is closest to the known first copy.
template <class Rule>
Branch calibrate_branch(Rule&& rule, const PhasePoint& known) {
  auto distance = [&](Branch b) {
    try {
      const PhasePoint p = rule(b);
      double d = 0.0;
      for (std::size_t i = 0; i < p.dim(); ++i) d = std::max(d, std::abs(p[i] - known[i]));
      return d;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return distance(Branch::minus) < distance(Branch::plus) ? Branch::minus : Branch::plus;
}

}  // namespace lhdeform
