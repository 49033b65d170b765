#pragma once

// Coordinate maps induced by the twist of the nonstandard deformation.

#include <array>

#include "lhdeform/oscillator.hpp"

namespace lhdeform::twist {

enum class Direction { forward, inverse };

/// forward: (x, y) -> ((1 - e^{-zx})/z, e^{zx} y).
/// inverse: (u, v) -> (-log(1 - z u)/z, (1 - z u) v), requires 1 - z u > 0.
PhasePoint twist_vars(const PhasePoint& p, double z, Direction dir = Direction::forward);

/// du/dt = b1 + b3 u,  dv/dt = b2/(1 - z u) - b3 v.
std::array<double, 2> minimal_rhs(double t, const PhasePoint& p, double z, const H4Coefficients& c);
VectorField minimal_field(H4Coefficients c, double z);

/// forward: (x1', y1', x2', y2') -> (x1, y1, x2, y2) with q = 1 - z x2',
///   x1 = x1'/q, y1 = y1' q, x2 = x2', y2 = (y2' q - z x1' y1')/q.
/// Both directions require q != 0.
PhasePoint twisted_two_copy_map(const PhasePoint& P, double z,
                                Direction dir = Direction::forward);

/// Two-copy functions whose pullback by twisted_two_copy_map is the
/// undeformed diagonal sum (h1, h2, h3, h0).
std::array<double, 4> twisted_h2_functions(const PhasePoint& P, double z);
/// Index 0..3 selects h1, h2, h3, h0.
ScalarField twisted_h2_field(int index, double z);

}  // namespace lhdeform::twist
