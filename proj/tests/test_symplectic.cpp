#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lhdeform/deformed.hpp"
#include "lhdeform/oscillator.hpp"
#include "lhdeform/symplectic.hpp"
#include "lhdeform/twist.hpp"

using namespace lhdeform;
using doctest::Approx;

namespace {

ScalarField field(std::function<double(Coords)> v, std::function<std::vector<double>(Coords)> g) {
  return {"test", 1, std::move(v), std::move(g)};
}

VectorField constant_field(double a, double b) {
  return {"const", 1, [a, b](double, Coords, std::span<double> out) {
            out[0] = a;
            out[1] = b;
          }};
}

const double ln2 = std::numbers::ln2;

}  // namespace

TEST_CASE("phase points") {
  const PhasePoint a{1, 2}, b{3, 4, 5, 6};
  const PhasePoint j = PhasePoint::join({a, b});
  CHECK(j.copies() == 3);
  CHECK(j.copy(2) == PhasePoint{5, 6});
  CHECK(j.x(1) == 3);
  CHECK_THROWS_AS(PhasePoint({1, 2, 3}), Error);
  CHECK_THROWS_AS(PhasePoint({1, 2, 3, 4, 5, 6, 7, 8}), Error);
}

TEST_CASE("hamiltonian vector fields") {
  const auto w = SymplecticWeight::canonical();
  SUBCASE("h = xy gives x d/dx - y d/dy") {
    const auto X = hamiltonian_vector_field(h4::hamiltonian(2), w);
    const auto v = X(0.0, std::vector<double>{1.5, -0.25});
    CHECK(v[0] == Approx(1.5));
    CHECK(v[1] == Approx(0.25));
  }
  SUBCASE("constant h gives the zero field") {
    const auto X = hamiltonian_vector_field(h4::hamiltonian(3), w);
    const auto v = X(0.0, std::vector<double>{0.3, 0.7});
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
  }
  SUBCASE("e^{zx} y at z = ln 2, (1,1)") {
    const auto X = hamiltonian_vector_field(deformed::hamiltonian(0, ln2), w);
    const auto v = X(0.0, std::vector<double>{1.0, 1.0});
    CHECK(v[0] == Approx(2.0).epsilon(1e-14));
    CHECK(v[1] == Approx(-2.0 * ln2).epsilon(1e-14));
  }
  SUBCASE("weight divides the field") {
    const auto w2 = SymplecticWeight::diagonal("two", [](double, double) { return 2.0; });
    const auto v = hamiltonian_vector_field(h4::hamiltonian(2), w2)(0.0, std::vector<double>{1.0, 1.0});
    CHECK(v[0] == Approx(0.5));
    CHECK(v[1] == Approx(-0.5));
  }
}

TEST_CASE("poisson brackets") {
  const auto w = SymplecticWeight::canonical();
  const std::vector<double> p{0.37, -1.2};
  CHECK(poisson_bracket(h4::hamiltonian(0), h4::hamiltonian(1), w, p) == Approx(1.0));
  CHECK(poisson_bracket(h4::hamiltonian(2), h4::hamiltonian(2), w, p) == 0.0);
  const double v =
      poisson_bracket(deformed::hamiltonian(1, ln2), deformed::hamiltonian(2, ln2), w, std::vector<double>{1.0, 1.0});
  CHECK(v == Approx(-1.0 / ln2).epsilon(1e-13));
  CHECK(v == Approx(-1.442695).epsilon(1e-6));
}

TEST_CASE("lie brackets") {
  const std::vector<double> p{0.4, -0.9};
  SUBCASE("constant fields commute") {
    const auto b = lie_bracket(constant_field(1, 0), constant_field(0, 1), 0.0, p);
    CHECK(std::abs(b[0]) < 1e-12);
    CHECK(std::abs(b[1]) < 1e-12);
  }
  SUBCASE("[X1, X3] = X1") {
    const auto b = lie_bracket(h4::generator(1), h4::generator(3), 0.0, p);
    CHECK(b[0] == Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(b[1]) < 1e-8);
  }
  SUBCASE("[Xz2, Xz3] = -e^{zx} Xz2") {
    const double z = 0.7;
    const auto b = lie_bracket(deformed::generator(2, z), deformed::generator(3, z), 0.0, p);
    CHECK(std::abs(b[0]) < 1e-8);
    CHECK(b[1] == Approx(-std::exp(z * p[0])).epsilon(1e-7));
  }
  SUBCASE("antisymmetric") {
    const auto a = lie_bracket(h4::generator(2), h4::generator(3), 0.0, p);
    const auto b = lie_bracket(h4::generator(3), h4::generator(2), 0.0, p);
    CHECK(a[1] == Approx(-b[1]));
  }
}

TEST_CASE("symplectic jacobian residual") {
  const auto w = SymplecticWeight::canonical();
  const std::vector<double> p{0.3, -0.6};
  CHECK(symplectic_jacobian_residual([](Coords q) { return std::vector<double>(q.begin(), q.end()); }, w, p) <= 1e-9);
  CHECK(symplectic_jacobian_residual([](Coords q) { return twist::twist_vars(PhasePoint({q[0], q[1]}), 0.8).values(); },
                                     w, p) <= 1e-7);
  CHECK(symplectic_jacobian_residual([](Coords q) { return std::vector<double>{2 * q[0], q[1]}; }, w, p) ==
        Approx(1.0).epsilon(1e-8));
}

TEST_CASE("finite differences and gradients") {
  const auto f = field([](Coords p) { return std::sin(p[0]) * p[1]; },
                       [](Coords p) { return std::vector<double>{std::cos(p[0]) * p[1], std::sin(p[0])}; });
  const std::vector<double> p{0.5, 2.0};
  CHECK(gradient_error(f, p) < 1e-9);
  const auto wrong = field(f.value, [](Coords p) { return std::vector<double>{std::cos(p[0]) * p[1], 0.0}; });
  CHECK(gradient_error(wrong, p) > 0.1);
  CHECK(fd_step(0.0) == Approx(std::cbrt(std::numeric_limits<double>::epsilon())));
  CHECK(fd_step(-100.0) == Approx(100.0 * fd_step(0.0)));
}

TEST_CASE("weights and matrices") {
  const auto w = SymplecticWeight::diagonal("q", [](double q, double) { return q; });
  CHECK_THROWS_AS(w.density(std::vector<double>{0.0, 1.0}, 0), DomainError);
  const auto m = symplectic_matrix(w, std::vector<double>{2.0, 1.0, 3.0, 0.0});
  CHECK(m(0, 1) == 2.0);
  CHECK(m(1, 0) == -2.0);
  CHECK(m(2, 3) == 3.0);
  CHECK(m(0, 3) == 0.0);
  CHECK_THROWS_AS(require_finite(std::vector<double>{1.0, NAN}, "p"), DomainError);
}
