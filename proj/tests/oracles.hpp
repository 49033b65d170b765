#pragma once

// Brute-force oracles shared by the tests.

#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using Eq2 = std::function<std::array<double, 2>(double x, double y)>;

// Newton with a central-difference Jacobian; nullopt when it stalls or
// leaves the domain of f.
inline std::optional<std::array<double, 2>> newton_raw(const Eq2& f, double x, double y) {
  for (int it = 0; it < 100; ++it) {
    const auto r = f(x, y);
    if (std::hypot(r[0], r[1]) < 1e-13) return std::array<double, 2>{x, y};
    const double h = 1e-7;
    const auto fx1 = f(x + h, y), fx0 = f(x - h, y), fy1 = f(x, y + h), fy0 = f(x, y - h);
    const double a = (fx1[0] - fx0[0]) / (2 * h), b = (fy1[0] - fy0[0]) / (2 * h);
    const double c = (fx1[1] - fx0[1]) / (2 * h), d = (fy1[1] - fy0[1]) / (2 * h);
    const double det = a * d - b * c;
    if (!(std::abs(det) > 1e-300)) return std::nullopt;
    x -= (d * r[0] - b * r[1]) / det;
    y -= (a * r[1] - c * r[0]) / det;
    if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  }
  const auto r = f(x, y);
  if (std::hypot(r[0], r[1]) < 1e-10) return std::array<double, 2>{x, y};
  return std::nullopt;
}

inline std::optional<std::array<double, 2>> newton(const Eq2& f, double x, double y) {
  try {
    return newton_raw(f, x, y);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Distinct roots reached from a grid of starting points.
inline std::vector<std::array<double, 2>> roots(const Eq2& f, double half = 4.0, int n = 9) {
  std::vector<std::array<double, 2>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -half + 2 * half * i / (n - 1), y = -half + 2 * half * j / (n - 1);
      const auto r = newton(f, x, y);
      if (!r) continue;
      bool seen = false;
      for (const auto& o : out) seen = seen || std::hypot(o[0] - (*r)[0], o[1] - (*r)[1]) < 1e-7;
      if (!seen) out.push_back(*r);
    }
  return out;
}

inline bool contains(const std::vector<std::array<double, 2>>& set, double x, double y, double tol) {
  for (const auto& r : set)
    if (std::abs(r[0] - x) <= tol && std::abs(r[1] - y) <= tol) return true;
  return false;
}

}  // namespace oracle
