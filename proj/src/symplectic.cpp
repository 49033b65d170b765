#include "lhdeform/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lhdeform {

namespace {

std::vector<double> to_vector(Coords p) { return {p.begin(), p.end()}; }

std::string describe(Coords p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace

void require_finite(Coords p, const char* what) {
  for (double v : p) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite coordinate at " + describe(p), to_vector(p));
  }
}

PhasePoint::PhasePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty() || coords_.size() % 2 != 0 || coords_.size() > 6)
    throw DomainError("phase point needs 2, 4 or 6 coordinates", coords_);
  require_finite(coords_, "phase point");
}

PhasePoint PhasePoint::join(std::initializer_list<PhasePoint> parts) {
  std::vector<double> all;
  for (const auto& p : parts) all.insert(all.end(), p.coords_.begin(), p.coords_.end());
  return PhasePoint(std::move(all));
}

SymplecticWeight SymplecticWeight::canonical() {
  return SymplecticWeight("canonical", [](double, double) { return 1.0; }, true);
}

SymplecticWeight SymplecticWeight::diagonal(std::string name, Density density) {
  return SymplecticWeight(std::move(name), std::move(density), false);
}

double SymplecticWeight::density(Coords p, std::size_t copy) const {
  if (canonical_) return 1.0;
  const double f = density_(p[2 * copy], p[2 * copy + 1]);
  if (!std::isfinite(f) || f == 0.0)
    throw DomainError("symplectic weight '" + name_ + "' degenerate at " + describe(p), to_vector(p));
  return f;
}

VectorField hamiltonian_vector_field(ScalarField h, SymplecticWeight w) {
  VectorField field;
  field.name = "X[" + h.name + "]";
  field.copies = h.copies;
  field.eval = [h = std::move(h), w = std::move(w)](double, Coords p, std::span<double> out) {
    const std::vector<double> g = h.gradient(p);
    require_finite(g, "hamiltonian gradient");
    for (std::size_t j = 0; j < p.size() / 2; ++j) {
      const double f = w.density(p, j);
      out[2 * j] = g[2 * j + 1] / f;
      out[2 * j + 1] = -g[2 * j] / f;
    }
  };
  return field;
}

double poisson_bracket(const ScalarField& f, const ScalarField& g, const SymplecticWeight& w,
                       Coords p) {
  const std::vector<double> df = f.gradient(p);
  const std::vector<double> dg = g.gradient(p);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size() / 2; ++j) {
    const double term = df[2 * j] * dg[2 * j + 1] - df[2 * j + 1] * dg[2 * j];
    sum += term / w.density(p, j);
  }
  if (!std::isfinite(sum)) throw DomainError("poisson bracket not finite at " + describe(p), to_vector(p));
  return sum;
}

double fd_step(double x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(x));
}

std::vector<double> fd_gradient(const std::function<double(Coords)>& f, Coords p) {
  std::vector<double> q(p.begin(), p.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = fd_step(p[i]);
    q[i] = p[i] + h;
    const double fp = f(q);
    q[i] = p[i] - h;
    const double fm = f(q);
    q[i] = p[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

Eigen::MatrixXd fd_jacobian(const PointMap& map, Coords p) {
  std::vector<double> q(p.begin(), p.end());
  const std::size_t rows = map(p).size();
  Eigen::MatrixXd jac(rows, p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = fd_step(p[i]);
    q[i] = p[i] + h;
    const std::vector<double> fp = map(q);
    q[i] = p[i] - h;
    const std::vector<double> fm = map(q);
    q[i] = p[i];
    for (std::size_t r = 0; r < rows; ++r) jac(r, i) = (fp[r] - fm[r]) / (2.0 * h);
  }
  if (!jac.allFinite()) throw DomainError("non-finite Jacobian at " + describe(p), to_vector(p));
  return jac;
}

double gradient_error(const ScalarField& f, Coords p) {
  const std::vector<double> analytic = f.gradient(p);
  const std::vector<double> numeric = fd_gradient(f.value, p);
  double scale = 1.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    scale = std::max(scale, std::abs(analytic[i]));
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
  }
  return diff / scale;
}

std::vector<double> lie_bracket(const VectorField& X, const VectorField& Y, double t, Coords p) {
  const PointMap xmap = [&](Coords q) { return X(t, q); };
  const PointMap ymap = [&](Coords q) { return Y(t, q); };
  const Eigen::MatrixXd dx = fd_jacobian(xmap, p);
  const Eigen::MatrixXd dy = fd_jacobian(ymap, p);
  const std::vector<double> xv = X(t, p);
  const std::vector<double> yv = Y(t, p);
  const Eigen::Map<const Eigen::VectorXd> xe(xv.data(), xv.size());
  const Eigen::Map<const Eigen::VectorXd> ye(yv.data(), yv.size());
  const Eigen::VectorXd br = dy * xe - dx * ye;
  return {br.data(), br.data() + br.size()};
}

Eigen::MatrixXd symplectic_matrix(const SymplecticWeight& w, Coords p) {
  const std::size_t n = p.size();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double f = w.density(p, j);
    omega(2 * j, 2 * j + 1) = f;
    omega(2 * j + 1, 2 * j) = -f;
  }
  return omega;
}

double symplectic_jacobian_residual(const PointMap& map, const SymplecticWeight& source,
                                    const SymplecticWeight& target, Coords p) {
  const std::vector<double> image = map(p);
  require_finite(image, "mapped point");
  const Eigen::MatrixXd jac = fd_jacobian(map, p);
  const Eigen::MatrixXd pulled = jac.transpose() * symplectic_matrix(target, image) * jac;
  return (pulled - symplectic_matrix(source, p)).cwiseAbs().maxCoeff();
}

}  // namespace lhdeform
