// Serial vs OpenMP timings of the residual kernels used by the verifier.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>

#include "lhdeform/deformed.hpp"
#include "lhdeform/parallel.hpp"
#include "lhdeform/verify.hpp"

using namespace lhdeform;

namespace {

constexpr double kZ = 0.5;

const std::vector<PhasePoint>& points(std::size_t n) {
  static std::map<std::size_t, std::vector<PhasePoint>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, verify::random_points(n, 3, 1.0, 7)).first;
  return it->second;
}

// {h1, h2} = e^{-z h2} h0 on three copies.
double bracket_residual(const PhasePoint& p) {
  static const ScalarField h1 = deformed::prolonged_hamiltonian(0, kZ), h2 = deformed::prolonged_hamiltonian(1, kZ);
  static const SymplecticWeight w = SymplecticWeight::canonical();
  const auto h = deformed::prolonged_hamiltonians(p, kZ);
  const double rhs = std::exp(-kZ * h[1]) * h[3];
  return std::abs(poisson_bracket(h1, h2, w, p.coords()) - rhs) / std::max(1.0, std::abs(rhs));
}

bool deficient(const PhasePoint& p) {
  static const std::vector<ScalarField> fs{deformed::fz2_field(kZ), deformed::fz2_right_field(kZ),
                                           deformed::fz3_field(kZ)};
  Eigen::MatrixXd m(fs.size(), 6);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto g = fs[i].gradient(p.coords());
    for (int j = 0; j < 6; ++j) m(i, j) = g[j];
    m.row(i).normalize();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff() < 1e-8;
}

double reconstruct(const PhasePoint& P) {
  try {
    const double k1 = deformed::fz2(P, kZ), k = deformed::fz3(P, kZ);
    const PhasePoint r = deformed::superpose(P.copy(1), P.copy(2), {k1, k, 0, Branch::plus}, kZ);
    return r[0];
  } catch (const Error&) {
    return std::nan("");
  }
}

template <bool Parallel>
void BM_BracketWorst(benchmark::State& state) {
  const auto& pts = points(state.range(0));
  for (auto _ : state) {
    const auto f = [&](std::size_t i) { return bracket_residual(pts[i]); };
    benchmark::DoNotOptimize(Parallel ? par::worst(pts.size(), f) : par::serial::worst(pts.size(), f));
  }
  state.SetItemsProcessed(state.iterations() * pts.size());
}

template <bool Parallel>
void BM_IndependenceCount(benchmark::State& state) {
  const auto& pts = points(state.range(0));
  for (auto _ : state) {
    const auto f = [&](std::size_t i) { return deficient(pts[i]); };
    benchmark::DoNotOptimize(Parallel ? par::count_if(pts.size(), f) : par::serial::count_if(pts.size(), f));
  }
  state.SetItemsProcessed(state.iterations() * pts.size());
}

template <bool Parallel>
void BM_SuperposeMap(benchmark::State& state) {
  const auto& pts = points(state.range(0));
  for (auto _ : state) {
    const auto f = [&](std::size_t i) { return reconstruct(pts[i]); };
    auto out = Parallel ? par::map<double>(pts.size(), f) : par::serial::map<double>(pts.size(), f);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * pts.size());
}

}  // namespace

BENCHMARK(BM_BracketWorst<false>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();
BENCHMARK(BM_BracketWorst<true>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();
BENCHMARK(BM_IndependenceCount<false>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();
BENCHMARK(BM_IndependenceCount<true>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();
BENCHMARK(BM_SuperposeMap<false>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();
BENCHMARK(BM_SuperposeMap<true>)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime();

BENCHMARK_MAIN();
