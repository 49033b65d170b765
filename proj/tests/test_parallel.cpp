#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "lhdeform/deformed.hpp"
#include "lhdeform/parallel.hpp"
#include "lhdeform/verify.hpp"

using namespace lhdeform;

namespace {

double residual(std::size_t i) {
  const double x = std::sin(0.37 * static_cast<double>(i));
  return std::abs(x) < 0.999 ? x * x : 1.0;
}

}  // namespace

TEST_CASE("parallel kernels match their serial twins") {
  for (int threads : {1, 2, 4, 8}) {
    omp_set_num_threads(threads);
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
      const auto s = par::serial::worst(n, residual);
      const auto p = par::worst(n, residual);
      CHECK(s.value == p.value);
      CHECK(s.index == p.index);
      CHECK(par::serial::count_if(n, [](std::size_t i) { return residual(i) > 0.5; }) ==
            par::count_if(n, [](std::size_t i) { return residual(i) > 0.5; }));
      CHECK(par::serial::map<double>(n, residual) == par::map<double>(n, residual));
    }
  }
}

TEST_CASE("ties, NaN and exceptions") {
  omp_set_num_threads(4);
  const auto tie = par::worst(100, [](std::size_t i) { return i % 10 == 3 ? 5.0 : 1.0; });
  CHECK(tie.index == 3);
  const auto nan = par::worst(10, [](std::size_t i) { return i == 6 ? NAN : 1.0; });
  CHECK(std::isinf(nan.value));
  CHECK(nan.index == 6);
  try {
    par::for_each(1000, [](std::size_t i) {
      if (i % 97 == 50) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "50");
  }
}

TEST_CASE("suite reports do not depend on the thread count") {
  omp_set_num_threads(1);
  const auto one = verify::suite_report(verify::run_suite("bracket.*,gradient.all,independence.*", 5), "s", 5).dump();
  omp_set_num_threads(6);
  const auto six = verify::suite_report(verify::run_suite("bracket.*,gradient.all,independence.*", 5), "s", 5).dump();
  CHECK(one == six);
}
