#pragma once

// Complex Bernoulli equation dw/dt = a1 w + a2 w^s in polar form w = r e^{i theta},
// its deformation, and the plane coordinates in which it becomes the book
// subsystem of the oscillator system:
//   x = r^{s-1}/sin(phi),  y = -cos(phi)/((s-1) r^{s-1}),  phi = theta (s-1).
// A polar point is a PhasePoint (r, theta) per copy.

#include <array>

#include "lhdeform/deformed.hpp"

namespace lhdeform::bernoulli {

struct Params {
  double s = 2.0;
  CoefficientSpec a1, a2;
  double z = 0.0;

  /// Throws Error when s is within 1e-12 of 0 or 1 or z is not finite.
  void validate() const;
  /// Book-subsystem coefficients b1 = 0, b2 = a2, b3 = (s-1) a1.
  H4Coefficients plane_coefficients() const;
};

/// Throws DomainError unless r > 0 and sin(theta (s-1)) != 0 for every copy.
void check_polar(const PhasePoint& q, double s);

/// Undeformed polar system.
std::array<double, 2> rhs(double t, const PhasePoint& q, const Params& p);
/// Deformed polar system; reduces to rhs at z = 0.
std::array<double, 2> deformed_rhs(double t, const PhasePoint& q, const Params& p);

/// One-copy field (deformed when p.z != 0).
VectorField vector_field(Params p);
/// Three copies of the undeformed system (z = 0), or the pullback of the
/// prolonged deformed book system for z != 0.
VectorField prolonged_field(Params p);

/// Per-copy maps. plane_to_polar picks phi in (0, pi), which needs x > 0.
PhasePoint polar_to_plane(const PhasePoint& q, double s);
PhasePoint plane_to_polar(const PhasePoint& p, double s);

/// Density (s-1)/(r sin^2(phi)).
SymplecticWeight weight(double s);

/// (hb1, hb2) undeformed, or (hbz1, hbz2) when z != 0.
std::array<double, 2> hamiltonians(const PhasePoint& q, double s, double z);
/// Index 0 or 1.
ScalarField hamiltonian(int index, double s, double z);

enum class Constant { F2, F2_right, F3, Fz2 };

/// Constants on a three-copy polar point, in the explicit 1/(1-s) form.
/// Fz2 uses the stored z and equals F2 at z = 0.
double constant(const PhasePoint& Q, const Params& p, Constant which);

/// First copy from copies 2 and 3 through the plane rule (deformed when z != 0).
PhasePoint superpose(const PhasePoint& q2, const PhasePoint& q3, const SuperpositionConstants& sc,
                     const Params& p);

/// The undeformed rule written in polar quantities and solved for (r1, theta1).
PhasePoint superpose_implicit(const PhasePoint& q2, const PhasePoint& q3,
                              const SuperpositionConstants& sc, const Params& p);

}  // namespace lhdeform::bernoulli
