#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "lhdeform/deformed.hpp"
#include "lhdeform/ode.hpp"
#include "lhdeform/twist.hpp"

using namespace lhdeform;
using doctest::Approx;

namespace {

H4Coefficients reference() {
  return {CoefficientSpec::constant(1), CoefficientSpec({term::Monomial{1, 1}}),
          CoefficientSpec({term::Sinusoid{1, 1, 0}}), {}};
}

}  // namespace

TEST_CASE("twist variables") {
  const PhasePoint p{0.6, -1.1};
  CHECK(twist::twist_vars(p, 0.0) == p);
  const PhasePoint t = twist::twist_vars(PhasePoint{1, 1}, std::numbers::ln2);
  CHECK(t[0] == Approx(1.0 / (2.0 * std::numbers::ln2)));
  CHECK(t[1] == Approx(2.0));
  const auto w = SymplecticWeight::canonical();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 100; ++k) {
    const PhasePoint q{u(rng), u(rng)};
    CHECK(symplectic_jacobian_residual([](Coords c) { return twist::twist_vars(PhasePoint({c[0], c[1]}), 0.7).values(); },
                                       w, q) <= 1e-7);
    const PhasePoint back = twist::twist_vars(twist::twist_vars(q, 0.7), 0.7, twist::Direction::inverse);
    CHECK(back[0] == Approx(q[0]).epsilon(1e-12));
    CHECK(back[1] == Approx(q[1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(twist::twist_vars(PhasePoint{2.0, 1.0}, 0.5, twist::Direction::inverse), DomainError);
}

TEST_CASE("minimal system") {
  const PhasePoint p{0.3, 0.2};
  CHECK(twist::minimal_rhs(0.9, p, 0.0, reference()) == h4::rhs(0.9, p, reference()));
  const H4Coefficients b2{{}, CoefficientSpec::constant(1), {}, {}};
  const auto v = twist::minimal_rhs(0.0, PhasePoint{1, 0}, 0.5, b2);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == Approx(2.0));
  CHECK_THROWS_AS(twist::minimal_rhs(0.0, PhasePoint{2, 0}, 0.5, b2), DomainError);
}

TEST_CASE("conjugacy of the deformed and minimal flows") {
  const double z = 0.5;
  for (const PhasePoint& p : {PhasePoint{-1.2, 0.4}, PhasePoint{-1.5, 1.0}, PhasePoint{-2.0, -0.7}}) {
    const auto a = integrate(deformed::vector_field(reference(), z), p, 0.0, 2.0, {1e-12, 1e-12});
    const auto b = integrate(twist::minimal_field(reference(), z), twist::twist_vars(p, z), 0.0, 2.0, {1e-12, 1e-12});
    const PhasePoint pushed = twist::twist_vars(a.final_state(), z);
    CHECK(std::abs(pushed[0] - b.final_state()[0]) <= 1e-8);
    CHECK(std::abs(pushed[1] - b.final_state()[1]) <= 1e-8);
  }
}

TEST_CASE("twisted two-copy map") {
  const PhasePoint P{0.2, -0.3, 0.4, 0.5};
  CHECK(twist::twisted_two_copy_map(P, 0.0) == P);
  const auto w = SymplecticWeight::canonical();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int k = 0; k < 100; ++k) {
    const PhasePoint Q{u(rng), u(rng), u(rng), u(rng)};
    const double z = 0.5;
    CHECK(symplectic_jacobian_residual(
              [z](Coords c) { return twist::twisted_two_copy_map(PhasePoint({c.begin(), c.end()}), z).values(); }, w, Q) <= 1e-7);
    const auto th = twist::twisted_h2_functions(twist::twisted_two_copy_map(Q, z), z);
    const auto a = h4::hamiltonians(Q.copy(0)), b = h4::hamiltonians(Q.copy(1));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(th[i] - (a[i] + b[i])) <= 1e-10 * std::max(1.0, std::abs(a[i] + b[i])));
    const PhasePoint back = twist::twisted_two_copy_map(twist::twisted_two_copy_map(Q, z), z, twist::Direction::inverse);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == Approx(Q[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(twist::twisted_two_copy_map(PhasePoint{1, 1, 2, 1}, 0.5), DomainError);
}

TEST_CASE("twisted functions close the undeformed table") {
  const auto w = SymplecticWeight::canonical();
  CHECK(twist::twisted_h2_functions(PhasePoint{0, 0, 0, 0}, 0.5) == std::array<double, 4>{0, 0, 0, 2});
  const auto h = twist::twisted_h2_functions(PhasePoint{0.3, 0.1, -0.2, 0.4}, 0.0);
  CHECK(h[0] == Approx(0.5));
  CHECK(h[1] == Approx(-0.1));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  const double z = 0.5;
  const auto H = [&](int i) { return twist::twisted_h2_field(i, z); };
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> p{u(rng), u(rng), u(rng), u(rng)};
    const auto v = twist::twisted_h2_functions(PhasePoint(p), z);
    CHECK(std::abs(poisson_bracket(H(0), H(1), w, p) - 2.0) <= 1e-9 * 2.0);
    CHECK(std::abs(poisson_bracket(H(0), H(2), w, p) + v[0]) <= 1e-9 * std::max(1.0, std::abs(v[0])));
    CHECK(std::abs(poisson_bracket(H(1), H(2), w, p) - v[1]) <= 1e-9 * std::max(1.0, std::abs(v[1])));
  }
}
