#include "lhdeform/twist.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lhdeform/deformed.hpp"
#include "lhdeform/errors.hpp"

namespace lhdeform::twist {

namespace {

// 1 - z x, rejecting exact or near zeros.
double gap(double z, double x, Coords p, const char* what) {
  const double q = 1.0 - z * x;
  if (!(std::abs(q) > 1e-14)) {
    std::ostringstream os;
    os << what << ": 1 - z x vanishes";
    throw DomainError(os.str(), {p.begin(), p.end()});
  }
  return q;
}

}  // namespace

PhasePoint twist_vars(const PhasePoint& p, double z, Direction dir) {
  if (p.copies() != 1) throw Error("twist variables act on one copy");
  const double x = p.x(0), y = p.y(0);
  if (dir == Direction::forward) {
    const double e = deformed::checked_exp(z * x);
    return PhasePoint{x * deformed::phi(-z * x), e * y};
  }
  const double q = 1.0 - z * x;
  if (!(q > 0.0)) throw DomainError("inverse twist needs 1 - z u > 0", p.values());
  return PhasePoint{z == 0.0 ? x : -std::log1p(-z * x) / z, q * y};
}

std::array<double, 2> minimal_rhs(double t, const PhasePoint& p, double z, const H4Coefficients& c) {
  const double x = p.x(0), y = p.y(0);
  const double q = 1.0 - z * x;
  if (!(q > 0.0)) throw DomainError("minimal system needs 1 - z u > 0", p.values());
  const double b3 = c.b3(t);
  return {c.b1(t) + b3 * x, c.b2(t) / q - b3 * y};
}

VectorField minimal_field(H4Coefficients c, double z) {
  VectorField f;
  f.name = "minimal-deformed";
  f.copies = 1;
  f.eval = [c = std::move(c), z](double t, Coords p, std::span<double> out) {
    const double q = 1.0 - z * p[0];
    if (!(q > 0.0)) throw DomainError("minimal system needs 1 - z u > 0", {p.begin(), p.end()});
    const double b3 = c.b3(t);
    out[0] = c.b1(t) + b3 * p[0];
    out[1] = c.b2(t) / q - b3 * p[1];
  };
  return f;
}

PhasePoint twisted_two_copy_map(const PhasePoint& P, double z, Direction dir) {
  if (P.copies() != 2) throw Error("two-copy twist acts on two copies");
  const double x1 = P.x(0), y1 = P.y(0), x2 = P.x(1), y2 = P.y(1);
  const double q = gap(z, x2, P.coords(), "two-copy twist");
  if (dir == Direction::forward) return PhasePoint{x1 / q, y1 * q, x2, y2 - z * x1 * y1 / q};
  return PhasePoint{x1 * q, y1 / q, x2, y2 + z * x1 * y1 / q};
}

std::array<double, 4> twisted_h2_functions(const PhasePoint& P, double z) {
  const double x1 = P.x(0), y1 = P.y(0), x2 = P.x(1), y2 = P.y(1);
  const double q = gap(z, x2, P.coords(), "twisted hamiltonians");
  return {y1 * (1.0 + z * x1) / q + y2, -x1 - x2 + z * x1 * x2, x1 * y1 / q + x2 * y2, 2.0};
}

ScalarField twisted_h2_field(int index, double z) {
  if (index < 0 || index > 3) throw Error("twisted hamiltonian index must be 0..3");
  static const char* names[] = {"th1(2)", "th2(2)", "th3(2)", "th0(2)"};
  ScalarField f;
  f.name = names[index];
  f.copies = 2;
  f.value = [index, z](Coords P) {
    return twisted_h2_functions(PhasePoint({P.begin(), P.end()}), z)[index];
  };
  f.gradient = [index, z](Coords P) {
    const double x1 = P[0], y1 = P[1], x2 = P[2], y2 = P[3];
    const double q = gap(z, x2, P, "twisted hamiltonians");
    switch (index) {
      case 0: return std::vector<double>{z * y1 / q, (1.0 + z * x1) / q, z * y1 * (1.0 + z * x1) / (q * q), 1.0};
      case 1: return std::vector<double>{-1.0 + z * x2, 0.0, -1.0 + z * x1, 0.0};
      case 2: return std::vector<double>{y1 / q, x1 / q, z * x1 * y1 / (q * q) + y2, x2};
      default: return std::vector<double>(4, 0.0);
    }
  };
  return f;
}

}  // namespace lhdeform::twist
