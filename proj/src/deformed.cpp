#include "lhdeform/deformed.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lhdeform/errors.hpp"

namespace lhdeform::deformed {

namespace {

constexpr double kMaxExponent = 700.0;

double ex(double z, double u) { return checked_exp(z * u); }

// (e^{zu} - 1)/z with the overflow guard.
double E(double z, double u) {
  checked_exp(z * u);
  return dexp(u, z);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Exponential factors of a three-copy point.
struct Factors {
  double e1, e2, e3, E1, E2, E3;
  Factors(Coords P, double z)
      : e1(ex(z, P[0])), e2(ex(z, P[2])), e3(ex(z, P[4])),
        E1(E(z, P[0])), E2(E(z, P[2])), E3(E(z, P[4])) {}
};

// Exponential factors of copies a, b.
struct PairFactors {
  double ea, eb, Ea, Eb;
  PairFactors(Coords P, double z, std::size_t a, std::size_t b)
      : ea(ex(z, P[2 * a])), eb(ex(z, P[2 * b])), Ea(E(z, P[2 * a])), Eb(E(z, P[2 * b])) {}
};

}  // namespace

double phi(double u) { return u == 0.0 ? 1.0 : std::expm1(u) / u; }

double checked_exp(double v) {
  if (!(std::abs(v) <= kMaxExponent))
    throw DomainError("exponent " + fmt(v) + " outside [-700, 700]", {v});
  return std::exp(v);
}

std::array<double, 4> hamiltonians(const PhasePoint& p, double z) {
  const double x = p.x(0), y = p.y(0);
  return {ex(z, x) * y, -x, E(z, x) * y, 1.0};
}

ScalarField hamiltonian(int index, double z) {
  ScalarField f;
  f.copies = 1;
  switch (index) {
    case 0:
      f.name = "hz1";
      f.value = [z](Coords p) { return ex(z, p[0]) * p[1]; };
      f.gradient = [z](Coords p) {
        const double e = ex(z, p[0]);
        return std::vector<double>{z * e * p[1], e};
      };
      break;
    case 1:
      f.name = "hz2";
      f.value = [](Coords p) { return -p[0]; };
      f.gradient = [](Coords) { return std::vector<double>{-1.0, 0.0}; };
      break;
    case 2:
      f.name = "hz3";
      f.value = [z](Coords p) { return E(z, p[0]) * p[1]; };
      f.gradient = [z](Coords p) { return std::vector<double>{ex(z, p[0]) * p[1], E(z, p[0])}; };
      break;
    case 3:
      f.name = "hz0";
      f.value = [](Coords) { return 1.0; };
      f.gradient = [](Coords) { return std::vector<double>{0.0, 0.0}; };
      break;
    default:
      throw Error("deformed hamiltonian index must be 0..3");
  }
  f.name += "(z=" + fmt(z) + ")";
  return f;
}

namespace {

void eval_rhs(double b1, double b2, double b3, double z, double x, double y, double* out) {
  const double e = ex(z, x);
  out[0] = b1 * e + b3 * E(z, x);
  out[1] = b2 - (b3 + z * b1) * e * y;
}

void eval_first_order(double b1, double b2, double b3, double z, double x, double y, double* out) {
  out[0] = b1 + (b3 + z * b1) * x + 0.5 * z * b3 * x * x;
  out[1] = b2 - (b3 + z * b1) * y - z * b3 * x * y;
}

}  // namespace

std::array<double, 2> rhs(double t, const PhasePoint& p, double z, const H4Coefficients& c) {
  std::array<double, 2> v;
  eval_rhs(c.b1(t), c.b2(t), c.b3(t), z, p.x(0), p.y(0), v.data());
  return v;
}

std::array<double, 2> rhs_first_order(double t, const PhasePoint& p, double z,
                                      const H4Coefficients& c) {
  std::array<double, 2> v;
  eval_first_order(c.b1(t), c.b2(t), c.b3(t), z, p.x(0), p.y(0), v.data());
  return v;
}

VectorField vector_field(H4Coefficients c, double z) {
  VectorField f;
  f.name = std::string(c.is_book() ? "b2" : "h4") + "-deformed";
  f.copies = 1;
  f.eval = [c = std::move(c), z](double t, Coords p, std::span<double> out) {
    eval_rhs(c.b1(t), c.b2(t), c.b3(t), z, p[0], p[1], out.data());
  };
  return f;
}

VectorField first_order_field(H4Coefficients c, double z) {
  VectorField f;
  f.name = "h4-deformed-first-order";
  f.copies = 1;
  f.eval = [c = std::move(c), z](double t, Coords p, std::span<double> out) {
    eval_first_order(c.b1(t), c.b2(t), c.b3(t), z, p[0], p[1], out.data());
  };
  return f;
}

VectorField generator(int index, double z) {
  VectorField f;
  f.copies = 1;
  switch (index) {
    case 1:
      f.name = "Xz1";
      f.eval = [z](double, Coords p, std::span<double> out) {
        const double e = ex(z, p[0]);
        out[0] = e;
        out[1] = -z * e * p[1];
      };
      break;
    case 2:
      f.name = "Xz2";
      f.eval = [](double, Coords, std::span<double> out) { out[0] = 0.0, out[1] = 1.0; };
      break;
    case 3:
      f.name = "Xz3";
      f.eval = [z](double, Coords p, std::span<double> out) {
        out[0] = E(z, p[0]);
        out[1] = -ex(z, p[0]) * p[1];
      };
      break;
    default:
      throw Error("deformed generator index must be 1..3");
  }
  return f;
}

std::array<double, 4> prolonged_hamiltonians(const PhasePoint& P, double z) {
  const Factors f(P.coords(), z);
  const double y1 = P.y(0), y2 = P.y(1), y3 = P.y(2);
  return {(3.0 * f.e1 - 2.0) * f.e2 * f.e3 * y1 + (2.0 * f.e2 - 1.0) * f.e3 * y2 + f.e3 * y3,
          -P.x(0) - P.x(1) - P.x(2),
          f.E1 * f.e2 * f.e3 * y1 + f.E2 * f.e3 * y2 + f.E3 * y3,
          3.0};
}

ScalarField prolonged_hamiltonian(int index, double z) {
  if (index < 0 || index > 3) throw Error("prolonged hamiltonian index must be 0..3");
  static const char* names[] = {"h1(3)", "h2(3)", "h3(3)", "h0(3)"};
  ScalarField f;
  f.name = std::string(names[index]) + "(z=" + fmt(z) + ")";
  f.copies = 3;
  f.value = [index, z](Coords P) { return prolonged_hamiltonians(PhasePoint({P.begin(), P.end()}), z)[index]; };
  f.gradient = [index, z](Coords P) {
    std::vector<double> g(6, 0.0);
    const double y1 = P[1], y2 = P[3], y3 = P[5];
    switch (index) {
      case 0: {
        const Factors f(P, z);
        const double h1 = (3.0 * f.e1 - 2.0) * f.e2 * f.e3 * y1 + (2.0 * f.e2 - 1.0) * f.e3 * y2 + f.e3 * y3;
        g[0] = 3.0 * z * f.e1 * f.e2 * f.e3 * y1;
        g[1] = (3.0 * f.e1 - 2.0) * f.e2 * f.e3;
        g[2] = z * (3.0 * f.e1 - 2.0) * f.e2 * f.e3 * y1 + 2.0 * z * f.e2 * f.e3 * y2;
        g[3] = (2.0 * f.e2 - 1.0) * f.e3;
        g[4] = z * h1;
        g[5] = f.e3;
        break;
      }
      case 1:
        g[0] = g[2] = g[4] = -1.0;
        break;
      case 2: {
        const Factors f(P, z);
        g[0] = f.e1 * f.e2 * f.e3 * y1;
        g[1] = f.E1 * f.e2 * f.e3;
        g[2] = z * f.E1 * f.e2 * f.e3 * y1 + f.e2 * f.e3 * y2;
        g[3] = f.E2 * f.e3;
        g[4] = z * f.E1 * f.e2 * f.e3 * y1 + z * f.E2 * f.e3 * y2 + f.e3 * y3;
        g[5] = f.E3;
        break;
      }
      default:
        break;
    }
    return g;
  };
  return f;
}

ScalarField pair_hamiltonian(int index, double z, Side side) {
  if (index < 0 || index > 3) throw Error("pair hamiltonian index must be 0..3");
  static const char* names[] = {"h1(2)", "h2(2)", "h3(2)", "h0(2)"};
  const std::size_t a = side == Side::left ? 0 : 1;
  const std::size_t b = a + 1;
  ScalarField f;
  f.name = std::string(names[index]) + (side == Side::left ? "L" : "R") + "(z=" + fmt(z) + ")";
  f.copies = 3;
  f.value = [index, z, a, b](Coords P) {
    const double ya = P[2 * a + 1], yb = P[2 * b + 1];
    switch (index) {
      case 0: {
        const PairFactors f(P, z, a, b);
        return (2.0 * f.ea - 1.0) * f.eb * ya + f.eb * yb;
      }
      case 1:
        return -P[2 * a] - P[2 * b];
      case 2: {
        const PairFactors f(P, z, a, b);
        return f.Ea * f.eb * ya + f.Eb * yb;
      }
      default:
        return 2.0;
    }
  };
  f.gradient = [index, z, a, b](Coords P) {
    std::vector<double> g(6, 0.0);
    const double ya = P[2 * a + 1], yb = P[2 * b + 1];
    switch (index) {
      case 0: {
        const PairFactors f(P, z, a, b);
        const double h = (2.0 * f.ea - 1.0) * f.eb * ya + f.eb * yb;
        g[2 * a] = 2.0 * z * f.ea * f.eb * ya;
        g[2 * a + 1] = (2.0 * f.ea - 1.0) * f.eb;
        g[2 * b] = z * h;
        g[2 * b + 1] = f.eb;
        break;
      }
      case 1:
        g[2 * a] = g[2 * b] = -1.0;
        break;
      case 2: {
        const PairFactors f(P, z, a, b);
        g[2 * a] = f.ea * f.eb * ya;
        g[2 * a + 1] = f.Ea * f.eb;
        g[2 * b] = z * f.Ea * f.eb * ya + f.eb * yb;
        g[2 * b + 1] = f.Eb;
        break;
      }
      default:
        break;
    }
    return g;
  };
  return f;
}

namespace {

void eval_prolonged(double b1, double b2, double b3, double z, Coords P, double* out) {
  const Factors f(P, z);
  const double y1 = P[1], y2 = P[3], y3 = P[5];
  const double m1 = std::expm1(z * P[0]), m2 = std::expm1(z * P[2]);
  const double e23 = f.e2 * f.e3;
  out[0] = b1 * (3.0 * f.e1 - 2.0) * e23 + b3 * f.E1 * e23;
  out[1] = b2 - (b3 + 3.0 * z * b1) * f.e1 * e23 * y1;
  out[2] = b1 * (2.0 * f.e2 - 1.0) * f.e3 + b3 * f.E2 * f.e3;
  out[3] = b2 - b3 * e23 * (m1 * y1 + y2) - z * b1 * e23 * ((3.0 * f.e1 - 2.0) * y1 + 2.0 * y2);
  out[4] = b1 * f.e3 + b3 * f.E3;
  out[5] = b2 - b3 * f.e3 * (m1 * f.e2 * y1 + m2 * y2 + y3) -
           z * b1 * f.e3 * ((3.0 * f.e1 - 2.0) * f.e2 * y1 + (2.0 * f.e2 - 1.0) * y2 + y3);
}

}  // namespace

std::array<double, 6> prolonged_rhs(double t, const PhasePoint& P, double z,
                                    const H4Coefficients& c) {
  if (P.copies() != 3) throw Error("prolonged system needs a three-copy point");
  std::array<double, 6> v;
  eval_prolonged(c.b1(t), c.b2(t), c.b3(t), z, P.coords(), v.data());
  return v;
}

VectorField prolonged_field(H4Coefficients c, double z) {
  VectorField f;
  f.name = std::string(c.is_book() ? "b2" : "h4") + "-deformed-prolonged";
  f.copies = 3;
  f.eval = [c = std::move(c), z](double t, Coords P, std::span<double> out) {
    eval_prolonged(c.b1(t), c.b2(t), c.b3(t), z, P, out.data());
  };
  return f;
}

double pair_constant(const PhasePoint& P, double z, std::size_t a, std::size_t b) {
  const Coords c = P.coords();
  return (-E(z, -c[2 * a]) - E(z, c[2 * b])) * (c[2 * a + 1] - c[2 * b + 1]);
}

ScalarField pair_constant_field(std::string name, double z, std::size_t a, std::size_t b) {
  if (a > 2 || b > 2 || a == b) throw Error("pair constant needs two distinct copies in 0..2");
  ScalarField f;
  f.name = std::move(name) + "(z=" + fmt(z) + ")";
  f.copies = 3;
  f.value = [z, a, b](Coords c) {
    return (-E(z, -c[2 * a]) - E(z, c[2 * b])) * (c[2 * a + 1] - c[2 * b + 1]);
  };
  f.gradient = [z, a, b](Coords c) {
    std::vector<double> g(6, 0.0);
    const double d = -E(z, -c[2 * a]) - E(z, c[2 * b]);
    const double dy = c[2 * a + 1] - c[2 * b + 1];
    g[2 * a] = ex(z, -c[2 * a]) * dy;
    g[2 * b] = -ex(z, c[2 * b]) * dy;
    g[2 * a + 1] = d;
    g[2 * b + 1] = -d;
    return g;
  };
  return f;
}

double fz2(const PhasePoint& P, double z) { return pair_constant(P, z, 0, 1); }
double fz2_right(const PhasePoint& P, double z) { return pair_constant(P, z, 1, 2); }

namespace {

struct Fz3Terms {
  std::array<double, 3> c;
  std::array<std::array<double, 3>, 3> dc;  // dc[j][i] = d c_i / d x_j
};

Fz3Terms fz3_terms(Coords P, double z, bool with_derivatives) {
  const double x1 = P[0], x2 = P[2], x3 = P[4];
  const double Em1 = E(z, -x1), E23 = E(z, x2 + x3), E3 = E(z, x3), Em12 = E(z, -x1 - x2);
  Fz3Terms t{};
  t.c = {-2.0 * Em1 - E23, 2.0 * Em1 - Em12 - 2.0 * E3 + E23, 2.0 * E3 + Em12};
  if (with_derivatives) {
    const double em1 = ex(z, -x1), e23 = ex(z, x2 + x3), e3 = ex(z, x3), em12 = ex(z, -x1 - x2);
    t.dc[0] = {2.0 * em1, -2.0 * em1 + em12, -em12};
    t.dc[1] = {-e23, em12 + e23, -em12};
    t.dc[2] = {-e23, -2.0 * e3 + e23, 2.0 * e3};
  }
  return t;
}

}  // namespace

double fz3(const PhasePoint& P, double z) {
  const auto t = fz3_terms(P.coords(), z, false);
  return t.c[0] * P.y(0) + t.c[1] * P.y(1) + t.c[2] * P.y(2);
}

ScalarField fz2_field(double z) { return pair_constant_field("Fz2", z, 0, 1); }
ScalarField fz2_right_field(double z) { return pair_constant_field("Fz2R", z, 1, 2); }

ScalarField fz3_field(double z) {
  ScalarField f;
  f.name = "Fz3(z=" + fmt(z) + ")";
  f.copies = 3;
  f.value = [z](Coords P) {
    const auto t = fz3_terms(P, z, false);
    return t.c[0] * P[1] + t.c[1] * P[3] + t.c[2] * P[5];
  };
  f.gradient = [z](Coords P) {
    const auto t = fz3_terms(P, z, true);
    std::vector<double> g(6);
    for (std::size_t j = 0; j < 3; ++j) {
      g[2 * j] = t.dc[j][0] * P[1] + t.dc[j][1] * P[3] + t.dc[j][2] * P[5];
      g[2 * j + 1] = t.c[j];
    }
    return g;
  };
  return f;
}

std::array<double, 3> perm_candidates(const PhasePoint& P, double z) {
  return {pair_constant(P, z, 1, 0), pair_constant(P, z, 2, 1), pair_constant(P, z, 0, 2)};
}

ScalarField perm_candidate_field(int which, double z) {
  switch (which) {
    case 0: return pair_constant_field("S12(Fz2)", z, 1, 0);
    case 1: return pair_constant_field("S13(Fz2)", z, 2, 1);
    case 2: return pair_constant_field("S23(Fz2)", z, 0, 2);
    default: throw Error("permutation candidate index must be 0..2");
  }
}

double superpose_x(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc,
                   double z) {
  if (z == 0.0) return h4::superpose(p2, p3, sc).x(0);
  const double x2 = p2.x(0), y2 = p2.y(0), x3 = p3.x(0), y3 = p3.y(0);
  const PhasePoint P = PhasePoint::join({p2, p2, p3});
  const double k3 = fz2_right(P, z);
  const double B = h4::branch_root(sc.k1, sc.k, k3);
  const double sB = sign(sc.branch) * B;
  const double e2 = ex(z, x2), e23 = ex(z, x2 + x3), e3 = ex(z, x3);
  const double dy = y2 - y3;
  const double G = E(z, -x2) + 3.0 * E(z, x3) - 2.0 * E(z, x2 + x3) + 3.0 * E(z, x2);
  const double num = dy * G + 0.5 * (2.0 * sc.k1 - sc.k + sB) - sc.k * (e2 - 2.0) +
                     sc.k1 * (e23 - 3.0);
  const double t1 = z * sc.k * (e2 - 2.0), t2 = z * sc.k1 * (e23 - 3.0),
               t3 = (e2 - 2.0) * (2.0 * e3 - 3.0) * dy;
  const double den = t1 - t2 + t3;
  if (std::abs(den) <= 1e-12 * (std::abs(t1) + std::abs(t2) + std::abs(t3)) || den == 0.0)
    throw SingularConfiguration("deformed superposition: x-denominator vanishes");
  const double w = num / den;
  const double arg = z * w;
  if (!(1.0 + arg > 0.0))
    throw OutOfBranch("deformed superposition: solved e^{z x1} = " + fmt(1.0 + arg) + " is not positive");
  return std::log1p(arg) / z;
}

PhasePoint superpose(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc,
                     double z) {
  if (z == 0.0) return h4::superpose(p2, p3, sc);
  const double x1 = superpose_x(p2, p3, sc, z);
  const double x2 = p2.x(0), y2 = p2.y(0), x3 = p3.x(0), y3 = p3.y(0);
  const PhasePoint P = PhasePoint::join({p2, p2, p3});
  const double k3 = fz2_right(P, z);
  const double sB = sign(sc.branch) * h4::branch_root(sc.k1, sc.k, k3);
  const double u = x2 * phi(-z * x2), v = x3 * phi(z * x3);
  const double d23 = u - v;
  if (std::abs(d23) <= 1e-12 * std::max(std::abs(u), std::abs(v)) || d23 == 0.0)
    throw SingularConfiguration("deformed superposition: y-denominator vanishes");
  const double e2 = ex(z, x2);
  const double y1 = y3 / e2 - std::expm1(-z * x2) * y2 + (sc.k - 2.0 * sc.k1 - sB) / (2.0 * e2 * d23);
  return PhasePoint{x1, y1};
}

}  // namespace lhdeform::deformed
