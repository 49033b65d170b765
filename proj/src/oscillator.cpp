#include "lhdeform/oscillator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lhdeform/errors.hpp"

namespace lhdeform::h4 {

namespace {

void check_denominator(double a, double b, const char* what) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= 1e-12 * scale)
    throw SingularConfiguration(std::string("superposition denominator vanishes: ") + what);
}

double root_of(double disc, double scale) {
  if (disc >= 0.0) return std::sqrt(disc);
  if (disc > -1e-12 * std::max(1.0, scale)) return 0.0;
  std::ostringstream os;
  os.precision(17);
  os << "superposition constraint violated: discriminant " << disc << " < 0";
  throw ConstraintViolation(os.str(), disc);
}

PhasePoint copy_of(Coords p, std::size_t j) { return PhasePoint{p[2 * j], p[2 * j + 1]}; }

}  // namespace

std::array<double, 4> hamiltonians(const PhasePoint& p) {
  const double x = p.x(0), y = p.y(0);
  return {y, -x, x * y, 1.0};
}

ScalarField hamiltonian(int index) {
  ScalarField f;
  f.copies = 1;
  switch (index) {
    case 0:
      f.name = "h1";
      f.value = [](Coords p) { return p[1]; };
      f.gradient = [](Coords) { return std::vector<double>{0.0, 1.0}; };
      break;
    case 1:
      f.name = "h2";
      f.value = [](Coords p) { return -p[0]; };
      f.gradient = [](Coords) { return std::vector<double>{-1.0, 0.0}; };
      break;
    case 2:
      f.name = "h3";
      f.value = [](Coords p) { return p[0] * p[1]; };
      f.gradient = [](Coords p) { return std::vector<double>{p[1], p[0]}; };
      break;
    case 3:
      f.name = "h0";
      f.value = [](Coords) { return 1.0; };
      f.gradient = [](Coords) { return std::vector<double>{0.0, 0.0}; };
      break;
    default:
      throw Error("h4 hamiltonian index must be 0..3");
  }
  return f;
}

std::array<double, 2> rhs(double t, const PhasePoint& p, const H4Coefficients& c) {
  const double b3 = c.b3(t);
  return {c.b1(t) + b3 * p.x(0), c.b2(t) - b3 * p.y(0)};
}

VectorField vector_field(H4Coefficients c) {
  VectorField f;
  f.name = c.is_book() ? "b2" : "h4";
  f.copies = 1;
  f.eval = [c = std::move(c)](double t, Coords p, std::span<double> out) {
    const double b3 = c.b3(t);
    out[0] = c.b1(t) + b3 * p[0];
    out[1] = c.b2(t) - b3 * p[1];
  };
  return f;
}

VectorField prolonged_field(H4Coefficients c) {
  VectorField f;
  f.name = c.is_book() ? "b2-prolonged" : "h4-prolonged";
  f.copies = 3;
  f.eval = [c = std::move(c)](double t, Coords p, std::span<double> out) {
    const double b1 = c.b1(t), b2 = c.b2(t), b3 = c.b3(t);
    for (std::size_t j = 0; j < p.size() / 2; ++j) {
      out[2 * j] = b1 + b3 * p[2 * j];
      out[2 * j + 1] = b2 - b3 * p[2 * j + 1];
    }
  };
  return f;
}

VectorField generator(int index) {
  VectorField f;
  f.copies = 1;
  switch (index) {
    case 1:
      f.name = "X1";
      f.eval = [](double, Coords, std::span<double> out) { out[0] = 1.0, out[1] = 0.0; };
      break;
    case 2:
      f.name = "X2";
      f.eval = [](double, Coords, std::span<double> out) { out[0] = 0.0, out[1] = 1.0; };
      break;
    case 3:
      f.name = "X3";
      f.eval = [](double, Coords p, std::span<double> out) { out[0] = p[0], out[1] = -p[1]; };
      break;
    default:
      throw Error("h4 generator index must be 1..3");
  }
  return f;
}

double f2(const PhasePoint& p1, const PhasePoint& p2) {
  return (p1.x(0) - p2.x(0)) * (p1.y(0) - p2.y(0));
}

double f3(const PhasePoint& p1, const PhasePoint& p2, const PhasePoint& p3) {
  return f2(p1, p2) + f2(p1, p3) + f2(p2, p3);
}

double f2_perm(const PhasePoint& p1, const PhasePoint& p2, const PhasePoint& p3, Permuted which) {
  if (which == Permuted::F13) return (p3.x(0) - p2.x(0)) * (p3.y(0) - p2.y(0));
  return (p1.x(0) - p3.x(0)) * (p1.y(0) - p3.y(0));
}

namespace {

// (x_a - x_b)(y_a - y_b) on a three-copy point.
ScalarField pair_field(std::string name, std::size_t a, std::size_t b) {
  ScalarField f;
  f.name = std::move(name);
  f.copies = 3;
  f.value = [a, b](Coords p) {
    return (p[2 * a] - p[2 * b]) * (p[2 * a + 1] - p[2 * b + 1]);
  };
  f.gradient = [a, b](Coords p) {
    std::vector<double> g(6, 0.0);
    const double dx = p[2 * a] - p[2 * b], dy = p[2 * a + 1] - p[2 * b + 1];
    g[2 * a] = dy;
    g[2 * b] = -dy;
    g[2 * a + 1] = dx;
    g[2 * b + 1] = -dx;
    return g;
  };
  return f;
}

}  // namespace

ScalarField f2_field() { return pair_field("F2", 0, 1); }

ScalarField f2_perm_field(Permuted which) {
  return which == Permuted::F13 ? pair_field("F13", 2, 1) : pair_field("F23", 0, 2);
}

ScalarField f3_field() {
  ScalarField f;
  f.name = "F3";
  f.copies = 3;
  f.value = [](Coords p) { return f3(copy_of(p, 0), copy_of(p, 1), copy_of(p, 2)); };
  f.gradient = [](Coords p) {
    std::vector<double> g(6, 0.0);
    const double sx = p[0] + p[2] + p[4], sy = p[1] + p[3] + p[5];
    for (std::size_t j = 0; j < 3; ++j) {
      g[2 * j] = 3.0 * p[2 * j + 1] - sy;
      g[2 * j + 1] = 3.0 * p[2 * j] - sx;
    }
    return g;
  };
  return f;
}

double discriminant(double k1, double k, double k3) {
  const double a = k - 2.0 * (k1 + k3);
  return a * a - 4.0 * k1 * k3;
}

double branch_root(double k1, double k, double k3) {
  return root_of(discriminant(k1, k, k3), std::max({k1 * k1, k * k, k3 * k3}));
}

PhasePoint superpose(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc) {
  const double x2 = p2.x(0), y2 = p2.y(0), x3 = p3.x(0), y3 = p3.y(0);
  check_denominator(y2, y3, "y2 = y3");
  check_denominator(x2, x3, "x2 = x3");
  const double k3 = (x3 - x2) * (y3 - y2);
  const double B = branch_root(sc.k1, sc.k, k3);
  const double s = sign(sc.branch);
  const double x1 = x3 + (sc.k - 2.0 * sc.k1 + s * B) / (2.0 * (y2 - y3));
  const double y1 = y3 + (sc.k - 2.0 * sc.k1 - s * B) / (2.0 * (x2 - x3));
  return PhasePoint{x1, y1};
}

PhasePoint superpose_legacy(const PhasePoint& p2, const PhasePoint& p3, double k1, double k2,
                            Branch branch) {
  const double x2 = p2.x(0), y2 = p2.y(0), x3 = p3.x(0), y3 = p3.y(0);
  check_denominator(y2, y3, "y2 = y3");
  check_denominator(x2, x3, "x2 = x3");
  const double k3 = (x3 - x2) * (y3 - y2);
  const double disc = k1 * k1 + k2 * k2 + k3 * k3 - 2.0 * (k1 * k2 + k1 * k3 + k2 * k3);
  const double B = root_of(disc, std::max({k1 * k1, k2 * k2, k3 * k3}));
  const double s = sign(branch);
  const double x1 = 0.5 * (x2 + x3) + (k2 - k1 + s * B) / (2.0 * (y2 - y3));
  const double y1 = 0.5 * (y2 + y3) + (k2 - k1 - s * B) / (2.0 * (x2 - x3));
  return PhasePoint{x1, y1};
}

}  // namespace lhdeform::h4
