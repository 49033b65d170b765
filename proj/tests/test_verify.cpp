#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lhdeform/verify.hpp"

using namespace lhdeform;
using namespace lhdeform::verify;

TEST_CASE("bracket tables") {
  for (const auto& t : bracket_tables()) {
    CAPTURE(t);
    const CheckReport r = check_bracket_table(t, 100, 1e-9, 42);
    CHECK(r.passed);
    CHECK(r.measured <= 1e-9);
    CHECK(r.witnesses.empty());
  }
  const CheckReport bad = check_bracket_table("h4-deformed", 100, 1e-9, 42, 1.0, true);
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.witnesses.empty());
  CHECK(bad.witnesses.size() <= 5);
  CHECK_THROWS_AS(check_bracket_table("nope", 10, 1e-9, 1), Error);
}

TEST_CASE("conservation and its inverted counterpart") {
  const CheckReport f3 = check_conservation("h4-prolonged", "F3", reference_flow("h4-prolonged", 0.0, 5.0));
  CHECK(f3.passed);
  CHECK(f3.measured <= 1e-6);
  const CheckReport fz3 =
      check_conservation("h4-deformed-prolonged", "F3", reference_flow("h4-deformed-prolonged", 0.5, 5.0));
  CHECK(fz3.passed);
  const CheckReport s23 =
      check_conservation("h4-deformed-prolonged", "S23", reference_flow("h4-deformed-prolonged", 0.5, 3.0));
  CHECK(s23.passed);
  CHECK(s23.lower_bound());
  CHECK(s23.measured > 1e-3);
  // A transposed constant is exactly conserved without deformation, so the
  // inverted check must fail there.
  const CheckReport s23_0 = check_conservation("h4-prolonged", "S23", reference_flow("h4-prolonged", 0.0, 3.0));
  CHECK_FALSE(s23_0.passed);
}

TEST_CASE("superposition checks") {
  CHECK(check_superposition("h4", reference_flow("h4-prolonged", 0.0, 2.0)).measured <= 1e-6);
  CHECK(check_superposition("h4-deformed", reference_flow("h4-deformed-prolonged", 0.3, 2.0)).measured <= 1e-6);
  CHECK(check_superposition("bernoulli", reference_bernoulli(0.0)).measured <= 1e-6);
}

TEST_CASE("limits") {
  const std::vector<double> grid{1e-2, 1e-3, 1e-4};
  for (const auto& f : limit_families()) {
    CAPTURE(f);
    const CheckReport r = check_limit(f, grid, 7);
    CHECK(r.passed);
    const double expected = f == "first-order" ? 2.0 : 1.0;
    CHECK(std::abs(r.measured - expected) < 0.05);
  }
  CHECK_THROWS_AS(check_limit("fz3", {1e-3}, 1), Error);
  CHECK_THROWS_AS(check_limit("fz3", {1e-4, 1e-3}, 1), Error);
  CHECK_THROWS_AS(check_limit("nope", grid, 1), Error);
}

TEST_CASE("independence") {
  const auto pts = random_points(200, 3, 2.0, 5);
  CHECK(check_independence("u", {h4::f2_field(), h4::f2_perm_field(h4::Permuted::F13), h4::f3_field()}, pts).passed);
  CHECK(check_independence("d", {deformed::fz2_field(0.5), deformed::fz2_right_field(0.5), deformed::fz3_field(0.5)}, pts)
            .passed);
  const CheckReport dup = check_independence("dup", {h4::f2_field(), h4::f2_field()}, pts);
  CHECK_FALSE(dup.passed);
  CHECK(dup.measured == 1.0);
}

TEST_CASE("registry and suites") {
  CHECK(select("all").size() == registry().size());
  const auto brackets = select("bracket.*");
  CHECK(brackets.size() == bracket_tables().size());
  for (const auto* e : brackets) CHECK(e->id.rfind("bracket.", 0) == 0);
  CHECK(select("bracket.h4,limit.fz3").size() == 2);
  CHECK_THROWS_AS(select("nothing.*"), Error);
  CHECK(check_seed(1, "a") != check_seed(1, "b"));
  CHECK(check_seed(1, "a") == check_seed(1, "a"));

  const auto a = run_suite("bracket.*,limit.*,twist.*", 99);
  const auto b = run_suite("bracket.*,limit.*,twist.*", 99);
  CHECK(suite_report(a, "x", 99).dump() == suite_report(b, "x", 99).dump());
  CHECK(failures(a) == 0);
}

TEST_CASE("report json roundtrip") {
  const CheckReport r = check_bracket_table("h4", 50, 1e-9, 3, 1.0, true);
  const CheckReport back = report_from_json(to_json(r));
  CHECK(back.check_id == r.check_id);
  CHECK(back.passed == r.passed);
  CHECK(back.measured == r.measured);
  CHECK(back.tolerance == r.tolerance);
  CHECK(back.witnesses.size() == r.witnesses.size());
  CHECK(back.metadata == r.metadata);
  CHECK(to_json(back).dump() == to_json(r).dump());
}
