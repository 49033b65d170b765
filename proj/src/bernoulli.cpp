#include "lhdeform/bernoulli.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lhdeform/errors.hpp"

namespace lhdeform::bernoulli {

namespace {

// Polar quantities of one copy.
struct Polar {
  double r, R, S, C;  // r, r^{s-1}, sin(phi), cos(phi)
  double X() const { return R / S; }
  double Cr() const { return C / R; }
};

Polar polar(double r, double theta, double s, Coords where) {
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(theta))
    throw DomainError("polar point needs r > 0", {where.begin(), where.end()});
  const double phi = theta * (s - 1.0);
  Polar q{r, std::pow(r, s - 1.0), std::sin(phi), std::cos(phi)};
  if (std::abs(q.S) < 1e-14 || !std::isfinite(q.R) || q.R == 0.0)
    throw DomainError("polar point on sin(theta (s-1)) = 0", {where.begin(), where.end()});
  return q;
}

// d(x, y)/d(r, theta) of one copy.
struct Jacobian {
  double xr, xt, yr, yt;
  Jacobian(const Polar& q, double s) {
    const double x = q.X();
    xr = (s - 1.0) * x / q.r;
    xt = -(s - 1.0) * x * q.C / q.S;
    yr = q.C / (q.r * q.R);
    yt = q.S / q.R;
  }
  double det() const { return xr * yt - xt * yr; }
};

std::array<double, 2> plane_gradient(int index, double x, double y, double s, double z) {
  if (index == 1) return {-1.0, 0.0};
  const double e = deformed::checked_exp(z * x);
  return {(s - 1.0) * e * y, (s - 1.0) * deformed::dexp(x, z)};
}

double pair_term(const Polar& a, const Polar& b, double s) {
  return (a.X() - b.X()) * (a.Cr() - b.Cr()) / (1.0 - s);
}

std::array<double, 2> eval_rhs(double a1, double a2, double z, const Polar& q) {
  const double rs = q.r * q.R;
  if (z == 0.0) return {a1 * q.r + a2 * rs * q.C, a2 * q.R * q.S};
  const double x = q.X();
  const double e = deformed::checked_exp(z * x);
  const double ph = deformed::phi(z * x);
  return {a1 * q.r * (q.C * q.C * e + q.S * q.S * ph) + a2 * rs * q.C,
          a1 * q.S * q.C * (e - ph) + a2 * q.R * q.S};
}

}  // namespace

void Params::validate() const {
  if (!std::isfinite(s) || std::abs(s) < 1e-12 || std::abs(s - 1.0) < 1e-12)
    throw Error("bernoulli exponent s must be finite and differ from 0 and 1");
  if (!std::isfinite(z)) throw Error("deformation parameter must be finite");
}

H4Coefficients Params::plane_coefficients() const {
  return H4Coefficients{CoefficientSpec::zero(), a2, scaled(a1, s - 1.0), CoefficientSpec::zero()};
}

void check_polar(const PhasePoint& q, double s) {
  for (std::size_t j = 0; j < q.copies(); ++j) polar(q.x(j), q.y(j), s, q.coords());
}

std::array<double, 2> rhs(double t, const PhasePoint& q, const Params& p) {
  return eval_rhs(p.a1(t), p.a2(t), 0.0, polar(q.x(0), q.y(0), p.s, q.coords()));
}

std::array<double, 2> deformed_rhs(double t, const PhasePoint& q, const Params& p) {
  return eval_rhs(p.a1(t), p.a2(t), p.z, polar(q.x(0), q.y(0), p.s, q.coords()));
}

VectorField vector_field(Params p) {
  p.validate();
  VectorField f;
  f.name = p.z == 0.0 ? "bernoulli" : "bernoulli-deformed";
  f.copies = 1;
  f.eval = [p = std::move(p)](double t, Coords q, std::span<double> out) {
    const auto v = eval_rhs(p.a1(t), p.a2(t), p.z, polar(q[0], q[1], p.s, q));
    out[0] = v[0];
    out[1] = v[1];
  };
  return f;
}

VectorField prolonged_field(Params p) {
  p.validate();
  VectorField f;
  f.copies = 3;
  if (p.z == 0.0) {
    f.name = "bernoulli-prolonged";
    f.eval = [p = std::move(p)](double t, Coords q, std::span<double> out) {
      const double a1 = p.a1(t), a2 = p.a2(t);
      for (std::size_t j = 0; j < 3; ++j) {
        const auto v = eval_rhs(a1, a2, 0.0, polar(q[2 * j], q[2 * j + 1], p.s, q));
        out[2 * j] = v[0];
        out[2 * j + 1] = v[1];
      }
    };
    return f;
  }
  f.name = "bernoulli-deformed-prolonged";
  f.eval = [p, plane = deformed::prolonged_field(p.plane_coefficients(), p.z)](
               double t, Coords q, std::span<double> out) {
    std::vector<double> P(6);
    std::array<Polar, 3> pq{polar(q[0], q[1], p.s, q), polar(q[2], q[3], p.s, q),
                            polar(q[4], q[5], p.s, q)};
    for (std::size_t j = 0; j < 3; ++j) {
      P[2 * j] = pq[j].X();
      P[2 * j + 1] = -pq[j].Cr() / (p.s - 1.0);
    }
    std::array<double, 6> w;
    plane.eval(t, P, w);
    for (std::size_t j = 0; j < 3; ++j) {
      const Jacobian J(pq[j], p.s);
      const double d = J.det();
      out[2 * j] = (J.yt * w[2 * j] - J.xt * w[2 * j + 1]) / d;
      out[2 * j + 1] = (-J.yr * w[2 * j] + J.xr * w[2 * j + 1]) / d;
    }
  };
  return f;
}

PhasePoint polar_to_plane(const PhasePoint& q, double s) {
  std::vector<double> out(q.dim());
  for (std::size_t j = 0; j < q.copies(); ++j) {
    const Polar p = polar(q.x(j), q.y(j), s, q.coords());
    out[2 * j] = p.X();
    out[2 * j + 1] = -p.Cr() / (s - 1.0);
  }
  return PhasePoint(std::move(out));
}

PhasePoint plane_to_polar(const PhasePoint& p, double s) {
  std::vector<double> out(p.dim());
  for (std::size_t j = 0; j < p.copies(); ++j) {
    const double x = p.x(j), y = p.y(j);
    if (!(x > 0.0))
      throw DomainError("plane point has no polar image on the branch 0 < theta (s-1) < pi (needs x > 0)",
                        p.values());
    const double sxy = (s - 1.0) * x * y;
    const double R = x / std::sqrt(1.0 + sxy * sxy);
    const double sn = R / x, cs = -(s - 1.0) * y * R;
    const double phi = std::atan2(sn, cs);
    out[2 * j] = std::exp(std::log(R) / (s - 1.0));
    out[2 * j + 1] = phi / (s - 1.0);
  }
  return PhasePoint(std::move(out));
}

SymplecticWeight weight(double s) {
  std::ostringstream os;
  os << "bernoulli(s=" << s << ")";
  return SymplecticWeight::diagonal(os.str(), [s](double r, double theta) {
    const double sn = std::sin(theta * (s - 1.0));
    return (s - 1.0) / (r * sn * sn);
  });
}

std::array<double, 2> hamiltonians(const PhasePoint& q, double s, double z) {
  const Polar p = polar(q.x(0), q.y(0), s, q.coords());
  const double h2 = -p.X();
  if (z == 0.0) return {-p.C / p.S, h2};
  deformed::checked_exp(z * p.X());
  return {-(p.C / p.S) * deformed::phi(z * p.X()), h2};
}

ScalarField hamiltonian(int index, double s, double z) {
  if (index != 0 && index != 1) throw Error("bernoulli hamiltonian index must be 0 or 1");
  std::ostringstream os;
  os << (index == 0 ? "hb1" : "hb2") << "(s=" << s << ",z=" << z << ")";
  ScalarField f;
  f.name = os.str();
  f.copies = 1;
  f.value = [index, s, z](Coords q) {
    return hamiltonians(PhasePoint({q[0], q[1]}), s, z)[index];
  };
  f.gradient = [index, s, z](Coords q) {
    const Polar p = polar(q[0], q[1], s, q);
    const Jacobian J(p, s);
    const auto g = plane_gradient(index, p.X(), -p.Cr() / (s - 1.0), s, z);
    return std::vector<double>{J.xr * g[0] + J.yr * g[1], J.xt * g[0] + J.yt * g[1]};
  };
  return f;
}

double constant(const PhasePoint& Q, const Params& prm, Constant which) {
  if (Q.copies() != 3) throw Error("bernoulli constants need a three-copy polar point");
  const double s = prm.s;
  const Polar p1 = polar(Q.x(0), Q.y(0), s, Q.coords());
  const Polar p2 = polar(Q.x(1), Q.y(1), s, Q.coords());
  const Polar p3 = polar(Q.x(2), Q.y(2), s, Q.coords());
  switch (which) {
    case Constant::F2:
      return pair_term(p1, p2, s);
    case Constant::F2_right:
      return pair_term(p2, p3, s);
    case Constant::F3:
      return pair_term(p1, p2, s) + pair_term(p1, p3, s) + pair_term(p2, p3, s);
    case Constant::Fz2: {
      const double z = prm.z;
      deformed::checked_exp(z * p1.X());
      deformed::checked_exp(z * p2.X());
      const double lead = -deformed::dexp(-p1.X(), z) - deformed::dexp(p2.X(), z);
      return lead * (p1.Cr() - p2.Cr()) / (1.0 - s);
    }
  }
  throw Error("unknown bernoulli constant");
}

PhasePoint superpose(const PhasePoint& q2, const PhasePoint& q3, const SuperpositionConstants& sc,
                     const Params& p) {
  p.validate();
  const PhasePoint r1 = deformed::superpose(polar_to_plane(q2, p.s), polar_to_plane(q3, p.s), sc, p.z);
  return plane_to_polar(r1, p.s);
}

PhasePoint superpose_implicit(const PhasePoint& q2, const PhasePoint& q3,
                              const SuperpositionConstants& sc, const Params& prm) {
  prm.validate();
  const double s = prm.s;
  const Polar p2 = polar(q2.x(0), q2.y(0), s, q2.coords());
  const Polar p3 = polar(q3.x(0), q3.y(0), s, q3.coords());
  const double X2 = p2.X(), X3 = p3.X(), C2 = p2.Cr(), C3 = p3.Cr();
  const double dC = C2 - C3, dX = X2 - X3;
  if (std::abs(dC) <= 1e-12 * std::max({1.0, std::abs(C2), std::abs(C3)}) ||
      std::abs(dX) <= 1e-12 * std::max({1.0, std::abs(X2), std::abs(X3)}))
    throw SingularConfiguration("bernoulli superposition denominator vanishes");
  const double k3 = pair_term(p2, p3, s);
  const double sB = sign(sc.branch) * h4::branch_root(sc.k1, sc.k, k3);
  const double X1 = X3 + (1.0 - s) * (sc.k - 2.0 * sc.k1 + sB) / (2.0 * dC);
  const double C1 = C3 + (1.0 - s) * (sc.k - 2.0 * sc.k1 - sB) / (2.0 * dX);
  if (!(X1 > 0.0))
    throw DomainError("reconstructed copy leaves the branch 0 < theta (s-1) < pi", {X1, C1});
  const double R = X1 / std::sqrt(1.0 + C1 * C1 * X1 * X1);
  const double phi = std::atan2(R / X1, C1 * R);
  return PhasePoint{std::exp(std::log(R) / (s - 1.0)), phi / (s - 1.0)};
}

}  // namespace lhdeform::bernoulli
