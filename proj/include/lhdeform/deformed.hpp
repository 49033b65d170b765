#pragma once

// Nonstandard deformation of the oscillator system with parameter z.
//
// Every (e^{zu} - 1)/z factor is evaluated as u * phi(zu), so z = 0 gives the
// undeformed closed forms with no division. Exponents with |z u| > 700 raise
// DomainError.

#include <array>

#include "lhdeform/oscillator.hpp"

namespace lhdeform::deformed {

/// (e^u - 1)/u with phi(0) = 1.
double phi(double u);

/// e^v, throwing DomainError when |v| > 700.
double checked_exp(double v);

/// (e^{zu} - 1)/z.
inline double dexp(double u, double z) { return u * phi(z * u); }

/// (e^{zx} y, -x, (e^{zx} - 1)/z * y, 1).
std::array<double, 4> hamiltonians(const PhasePoint& p, double z);
/// Index 0..3 selects h_{z,1}, h_{z,2}, h_{z,3}, h_{z,0}.
ScalarField hamiltonian(int index, double z);

/// dx/dt = b1 e^{zx} + b3 (e^{zx} - 1)/z,  dy/dt = b2 - (b3 + z b1) e^{zx} y.
std::array<double, 2> rhs(double t, const PhasePoint& p, double z, const H4Coefficients& c);
/// Truncation of rhs at first order in z.
std::array<double, 2> rhs_first_order(double t, const PhasePoint& p, double z,
                                      const H4Coefficients& c);
VectorField vector_field(H4Coefficients c, double z);
VectorField first_order_field(H4Coefficients c, double z);

/// Hamiltonian field of h_{z,i}, index 1..3.
VectorField generator(int index, double z);

/// Three-copy functions h^(3)_{z,i} (value order h1, h2, h3, h0).
std::array<double, 4> prolonged_hamiltonians(const PhasePoint& P, double z);
ScalarField prolonged_hamiltonian(int index, double z);

enum class Side { left, right };

/// Two-copy functions h^(2)_{z,i} on copies (1,2) (left) or (2,3) (right),
/// as functions on a three-copy point.
ScalarField pair_hamiltonian(int index, double z, Side side);

/// Hamilton equations of sum_i b_i h^(3)_{z,i}, written out term by term.
std::array<double, 6> prolonged_rhs(double t, const PhasePoint& P, double z,
                                    const H4Coefficients& c);
VectorField prolonged_field(H4Coefficients c, double z);

/// ((2 - e^{-z x_a} - e^{z x_b})/z)(y_a - y_b) for copies a, b in 0..2.
double pair_constant(const PhasePoint& P, double z, std::size_t a, std::size_t b);
ScalarField pair_constant_field(std::string name, double z, std::size_t a, std::size_t b);

/// Left constant of copies (1,2).
double fz2(const PhasePoint& P, double z);
/// Right constant of copies (2,3).
double fz2_right(const PhasePoint& P, double z);
/// Order-three constant.
double fz3(const PhasePoint& P, double z);

ScalarField fz2_field(double z);
ScalarField fz2_right_field(double z);
ScalarField fz3_field(double z);

/// fz2 with copies transposed: S12, S13, S23 in that order.
std::array<double, 3> perm_candidates(const PhasePoint& P, double z);
ScalarField perm_candidate_field(int which, double z);

/// First copy from copies 2 and 3; sc.k1 = fz2, sc.k = fz3 and k3 is
/// recomputed as fz2_right(p2, p3). z = 0 dispatches to h4::superpose.
/// Throws ConstraintViolation, SingularConfiguration or OutOfBranch.
PhasePoint superpose(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc,
                     double z);

/// Only the x1 part of superpose; defined when x2 = x3 as long as its own
/// denominator does not vanish.
double superpose_x(const PhasePoint& p2, const PhasePoint& p3, const SuperpositionConstants& sc,
                   double z);

}  // namespace lhdeform::deformed
