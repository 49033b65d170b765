#pragma once

// Symplectic structure on products of the plane.
//
// A phase point with n copies is stored as (x_1, y_1, ..., x_n, y_n). The
// symplectic form is w = sum_j F_j(x_j, y_j) dx_j ^ dy_j with a per-copy
// density F_j; the canonical form has F_j = 1. Everything here is a pure
// function of its arguments.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lhdeform/errors.hpp"

namespace lhdeform {

using Coords = std::span<const double>;

/// A point of (R^2)^n, n in {1, 2, 3}.
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(std::vector<double> coords);
  PhasePoint(std::initializer_list<double> coords)
      : PhasePoint(std::vector<double>(coords)) {}

  /// Concatenates single- or multi-copy points into one product point.
  static PhasePoint join(std::initializer_list<PhasePoint> parts);

  std::size_t copies() const noexcept { return coords_.size() / 2; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double x(std::size_t copy) const { return coords_.at(2 * copy); }
  double y(std::size_t copy) const { return coords_.at(2 * copy + 1); }
  PhasePoint copy(std::size_t j) const { return PhasePoint{x(j), y(j)}; }

  double operator[](std::size_t i) const { return coords_[i]; }
  Coords coords() const noexcept { return coords_; }
  operator Coords() const noexcept { return coords_; }
  const std::vector<double>& values() const noexcept { return coords_; }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Smooth real function on phase space with an analytic gradient.
struct ScalarField {
  std::string name;
  std::size_t copies = 1;
  std::function<double(Coords)> value;
  std::function<std::vector<double>(Coords)> gradient;

  double operator()(Coords p) const { return value(p); }
};

/// Per-copy density F of w = F dq ^ dp.
class SymplecticWeight {
 public:
  using Density = std::function<double(double q, double p)>;

  static SymplecticWeight canonical();
  static SymplecticWeight diagonal(std::string name, Density density);

  bool is_canonical() const noexcept { return canonical_; }
  const std::string& name() const noexcept { return name_; }

  /// Density of copy j at p. Throws DomainError when it is zero or not finite.
  double density(Coords p, std::size_t copy) const;

 private:
  SymplecticWeight(std::string name, Density density, bool canonical)
      : name_(std::move(name)), density_(std::move(density)), canonical_(canonical) {}

  std::string name_;
  Density density_;
  bool canonical_ = true;
};

/// Time-dependent vector field evaluated into a caller-provided buffer.
struct VectorField {
  std::string name;
  std::size_t copies = 1;
  std::function<void(double t, Coords p, std::span<double> out)> eval;

  std::vector<double> operator()(double t, Coords p) const {
    std::vector<double> out(p.size());
    eval(t, p, out);
    return out;
  }
};

using PointMap = std::function<std::vector<double>(Coords)>;

/// Field X_h with i_X w = dh: per copy ((dh/dy_j)/F_j, -(dh/dx_j)/F_j).
VectorField hamiltonian_vector_field(ScalarField h, SymplecticWeight w);

/// {f, g} = sum_j (f_x g_y - f_y g_x)/F_j evaluated at p.
double poisson_bracket(const ScalarField& f, const ScalarField& g, const SymplecticWeight& w,
                       Coords p);

/// [X, Y] = (DY) X - (DX) Y with finite-difference Jacobians.
std::vector<double> lie_bracket(const VectorField& X, const VectorField& Y, double t, Coords p);

/// Max-norm of J^T W(T(p)) J - W(p) for the finite-difference Jacobian J of T.
double symplectic_jacobian_residual(const PointMap& map, const SymplecticWeight& source,
                                    const SymplecticWeight& target, Coords p);
inline double symplectic_jacobian_residual(const PointMap& map, const SymplecticWeight& w,
                                           Coords p) {
  return symplectic_jacobian_residual(map, w, w, p);
}

/// Central-difference step cbrt(eps) * max(1, |x|).
double fd_step(double x);

std::vector<double> fd_gradient(const std::function<double(Coords)>& f, Coords p);

/// Columns are derivatives with respect to each input coordinate.
Eigen::MatrixXd fd_jacobian(const PointMap& map, Coords p);

/// ||analytic - finite difference||_inf / max(1, ||analytic||_inf).
double gradient_error(const ScalarField& f, Coords p);

/// Block-diagonal matrix with blocks F_j [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_matrix(const SymplecticWeight& w, Coords p);

/// Throws DomainError unless every entry is finite.
void require_finite(Coords p, const char* what);

}  // namespace lhdeform
