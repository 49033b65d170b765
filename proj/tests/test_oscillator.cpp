#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lhdeform/experiment.hpp"
#include "lhdeform/oscillator.hpp"
#include "oracles.hpp"

using namespace lhdeform;
using doctest::Approx;

namespace {

const PhasePoint p1{2, 3}, p2{1, 0}, p3{0, 1};

H4Coefficients coeffs(double b1, double b2, double b3) {
  return {CoefficientSpec::constant(b1), CoefficientSpec::constant(b2), CoefficientSpec::constant(b3), {}};
}

}  // namespace

TEST_CASE("hamiltonians") {
  CHECK(h4::hamiltonians(PhasePoint{0, 0}) == std::array<double, 4>{0, 0, 0, 1});
  CHECK(h4::hamiltonians(PhasePoint{1, 2}) == std::array<double, 4>{2, -1, 2, 1});
  for (int i = 0; i < 4; ++i) CHECK(h4::hamiltonian(i)(std::vector<double>{1, 2}) == h4::hamiltonians(PhasePoint{1, 2})[i]);
  CHECK_THROWS_AS(h4::hamiltonian(4), Error);
}

TEST_CASE("bracket table at random points") {
  const auto w = SymplecticWeight::canonical();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> p{u(rng), u(rng)};
    const auto h = [&](int i) { return h4::hamiltonian(i); };
    CHECK(std::abs(poisson_bracket(h(0), h(1), w, p) - 1.0) <= 1e-9);
    CHECK(std::abs(poisson_bracket(h(0), h(2), w, p) + p[1]) <= 1e-9);
    CHECK(std::abs(poisson_bracket(h(1), h(2), w, p) + p[0]) <= 1e-9);
  }
}

TEST_CASE("rhs") {
  CHECK(h4::rhs(0.0, PhasePoint{1, 1}, {}) == std::array<double, 2>{0, 0});
  CHECK(h4::rhs(0.0, PhasePoint{1, 1}, coeffs(1, 2, 3)) == std::array<double, 2>{4, -1});
  const H4Coefficients book{{}, CoefficientSpec::constant(1), CoefficientSpec::constant(1), {}};
  CHECK(book.is_book());
  CHECK(h4::rhs(0.0, PhasePoint{1, 1}, book) == std::array<double, 2>{1, 0});
  const auto v = h4::prolonged_field(coeffs(1, 2, 3))(0.0, std::vector<double>{1, 1, 0, 0, -1, 2});
  CHECK(v == std::vector<double>{4, -1, 1, 2, -2, -4});
}

TEST_CASE("two- and three-copy constants") {
  CHECK(h4::f2(p1, p1) == 0);
  CHECK(h4::f2(p1, p2) == 3);
  CHECK(h4::f2(p2, p1) == h4::f2(p1, p2));
  CHECK(h4::f3(p1, p1, p1) == 0);
  CHECK(h4::f3(p1, p2, p3) == 6);
  CHECK(h4::f2_perm(p1, p2, p3, h4::Permuted::F13) == -1);
  CHECK(h4::f2_perm(p1, p2, p3, h4::Permuted::F23) == 4);
  CHECK(h4::f2_perm(p1, p2, p2, h4::Permuted::F13) == 0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 50; ++k) {
    const PhasePoint a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double sum = h4::f2(a, b) + h4::f2(a, c) + h4::f2(b, c);
    CHECK(h4::f3(a, b, c) == Approx(sum).epsilon(1e-12));
    CHECK(h4::f2_perm(a, b, c, h4::Permuted::F13) == Approx(h4::f2(b, c)).epsilon(1e-12));
    const PhasePoint P = PhasePoint::join({a, b, c});
    CHECK(h4::f2_field()(P) == Approx(h4::f2(a, b)));
    CHECK(h4::f3_field()(P) == Approx(h4::f3(a, b, c)));
    CHECK(gradient_error(h4::f3_field(), P) < 1e-7);
    CHECK(gradient_error(h4::f2_perm_field(h4::Permuted::F23), P) < 1e-7);
  }
}

TEST_CASE("constants are conserved by three copies") {
  const H4Coefficients c{CoefficientSpec::constant(1), CoefficientSpec({term::Monomial{1, 1}}),
                         CoefficientSpec({term::Sinusoid{1, 1, 0}}), {}};
  const PhasePoint P0{-0.5, 1, -1, -0.5, -1.5, 0.5};
  const auto tr = integrate(h4::prolonged_field(c), P0, 0.0, 5.0, {1e-12, 1e-12});
  const auto& P = tr.final_state();
  CHECK(h4::f2(P.copy(0), P.copy(1)) == Approx(h4::f2(P0.copy(0), P0.copy(1))).epsilon(1e-9));
  CHECK(h4::f3(P.copy(0), P.copy(1), P.copy(2)) == Approx(h4::f3(P0.copy(0), P0.copy(1), P0.copy(2))).epsilon(1e-9));
}

TEST_CASE("superposition rule") {
  SUBCASE("worked example") {
    CHECK(h4::discriminant(3, 6, -1) == Approx(16));
    CHECK(h4::branch_root(3, 6, -1) == Approx(4));
    const PhasePoint r = h4::superpose(p2, p3, {3, 6, -1, Branch::minus});
    CHECK(r[0] == Approx(2.0).epsilon(1e-14));
    CHECK(r[1] == Approx(3.0).epsilon(1e-14));
    const PhasePoint l = h4::superpose_legacy(p2, p3, 3, 4, Branch::minus);
    const PhasePoint lp = h4::superpose_legacy(p2, p3, 3, 4, Branch::plus);
    CHECK(((l[0] == Approx(2) && l[1] == Approx(3)) || (lp[0] == Approx(2) && lp[1] == Approx(3))));
  }
  SUBCASE("both branches are exactly the roots of the constant equations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    int tested = 0;
    while (tested < 20) {
      const PhasePoint a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
      if (std::abs(b[1] - c[1]) < 0.3 || std::abs(b[0] - c[0]) < 0.3) continue;
      const double k1 = h4::f2(a, b), k = h4::f3(a, b, c);
      if (h4::discriminant(k1, k, h4::f2(b, c)) < 0.05) continue;
      const auto roots = oracle::roots([&](double x, double y) {
        const PhasePoint q{x, y};
        return std::array<double, 2>{h4::f2(q, b) - k1, h4::f3(q, b, c) - k};
      });
      CHECK(roots.size() == 2);
      for (Branch br : {Branch::plus, Branch::minus}) {
        const PhasePoint r = h4::superpose(b, c, {k1, k, 0, br});
        CHECK(oracle::contains(roots, r[0], r[1], 1e-8));
      }
      ++tested;
    }
  }
  SUBCASE("k1 = k = 0 against a root solve") {
    const PhasePoint b{0.3, 1.0}, c{-0.4, -0.5};
    const double k3 = h4::f2(b, c);
    CHECK(h4::branch_root(0, 0, k3) == Approx(2 * std::abs(k3)));
    const auto roots = oracle::roots([&](double x, double y) {
      const PhasePoint q{x, y};
      return std::array<double, 2>{h4::f2(q, b), h4::f3(q, b, c)};
    });
    for (Branch br : {Branch::plus, Branch::minus}) {
      const PhasePoint r = h4::superpose(b, c, {0, 0, 0, br});
      CHECK(oracle::contains(roots, r[0], r[1], 1e-8));
    }
  }
  SUBCASE("legacy agrees with the simplified form") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int n = 0; n < 50; ++n) {
      const PhasePoint a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
      if (std::abs(b[1] - c[1]) < 0.1) continue;
      const double k1 = h4::f2(a, b), k2 = h4::f2_perm(a, b, c, h4::Permuted::F23), k3 = h4::f2(b, c);
      for (Branch br : {Branch::plus, Branch::minus}) {
        const PhasePoint l = h4::superpose_legacy(b, c, k1, k2, br);
        const PhasePoint s = h4::superpose(b, c, {k1, k1 + k2 + k3, 0, br});
        CHECK(std::abs(l[0] - s[0]) <= 1e-10 * std::max(1.0, std::abs(s[0])));
        CHECK(std::abs(l[1] - s[1]) <= 1e-10 * std::max(1.0, std::abs(s[1])));
      }
    }
  }
  SUBCASE("k1 = k2 puts the branches symmetric about the midpoint") {
    const PhasePoint b{0.5, 1.0}, c{-1.0, -0.7};
    // a = (2, -2.4) gives F2(a, b) = F2(a, c) = -5.1.
    const PhasePoint a{2.0, -2.4};
    REQUIRE(h4::f2(a, b) == Approx(h4::f2(a, c)));
    const double k = h4::f2(a, b);
    const PhasePoint l = h4::superpose_legacy(b, c, k, k, Branch::plus);
    const PhasePoint m = h4::superpose_legacy(b, c, k, k, Branch::minus);
    CHECK(0.5 * (l[0] + m[0]) == Approx(0.5 * (b[0] + c[0])));
    const bool hit = (l[0] == Approx(2.0) && l[1] == Approx(-2.4)) || (m[0] == Approx(2.0) && m[1] == Approx(-2.4));
    CHECK(hit);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(h4::superpose(PhasePoint{0, 1}, PhasePoint{1, 1}, {1, 1, 0, Branch::plus}), SingularConfiguration);
    CHECK_THROWS_AS(h4::superpose(PhasePoint{1, 0}, PhasePoint{1, 1}, {1, 1, 0, Branch::plus}), SingularConfiguration);
    CHECK_THROWS_AS(h4::superpose(p2, p3, {-1, -4, 0, Branch::plus}), ConstraintViolation);
    CHECK_THROWS_AS(h4::branch_root(1, 4, 1), ConstraintViolation);
    CHECK(h4::branch_root(1, 6, 1) == 0.0);
  }
}

TEST_CASE("reconstruction along integrated copies") {
  FlowSpec spec;
  spec.system = "h4-prolonged";
  spec.coefficients = {CoefficientSpec::constant(1), CoefficientSpec({term::Monomial{1, 1}}),
                       CoefficientSpec({term::Sinusoid{1, 1, 0}}), {}};
  const auto tr = integrate(make_flow(spec), PhasePoint{-0.5, 1, -1, -0.5, -1.5, 0.5}, 0.0, 2.0, {1e-12, 1e-12});
  const auto rec = reconstruct(spec, tr, std::nullopt, 50);
  CHECK(rec.samples.size() == 50);
  CHECK(rec.failures == 0);
  CHECK(rec.max_error <= 1e-6);
  const auto wrong = reconstruct(spec, tr, opposite(rec.branch), 50);
  CHECK(wrong.max_error > 1e-3);
}
