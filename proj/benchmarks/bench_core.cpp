#include <cmath>

#include <benchmark/benchmark.h>

#include "wce/chaos_field.hpp"
#include "wce/filtering.hpp"
#include "wce/multiindex.hpp"
#include "wce/oracle.hpp"
#include "wce/propagator.hpp"

using namespace wce;

namespace {

ConstantCoefficients heat(double a, double sigma) {
  ConstantCoefficients c;
  c.a = a;
  c.sigma = {sigma};
  c.nu = {0.0};
  return c;
}

Field bump(const Grid& g) {
  return g.sample([](double x) { return std::exp(-x * x / 2.0); });
}

}  // namespace

static void BM_Enumerate(benchmark::State& state) {
  const TruncationSpec s{static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(IndexSet(s));
  state.counters["indices"] = static_cast<double>(truncation_size(s));
}
BENCHMARK(BM_Enumerate)->Args({2, 32})->Args({4, 16})->Args({4, 32})->Unit(benchmark::kMillisecond);

static void BM_ProductTable(benchmark::State& state) {
  const IndexSet set({static_cast<int>(state.range(0)), 2, 2});
  for (auto _ : state) benchmark::DoNotOptimize(ProductTable(set));
  state.counters["pairs"] = static_cast<double>(set.size() * (set.size() + 1) / 2);
}
BENCHMARK(BM_ProductTable)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_SpectralSolve(benchmark::State& state) {
  const Grid g = Grid::periodic(40.0, static_cast<int>(state.range(1)));
  auto d = make_spectral(g, {heat(1.0, 1.0)});
  auto p = SpdeProblem::deterministic(d, {static_cast<int>(state.range(0)), 4, 1}, {1.0, 200}, bump(g));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
  state.counters["indices"] = static_cast<double>(truncation_size(p.trunc));
}
BENCHMARK(BM_SpectralSolve)->Args({2, 128})->Args({4, 128})->Args({4, 512})->Unit(benchmark::kMillisecond);

static void BM_FiniteDifferenceSolve(benchmark::State& state) {
  const Grid g = Grid::interval(-6.0, 6.0, static_cast<int>(state.range(0)), Boundary::kDirichlet);
  auto d = make_finite_difference(g, {heat(1.0, 1.0)});
  auto p = SpdeProblem::deterministic(d, {3, 4, 1}, {1.0, 200}, bump(g));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_FiniteDifferenceSolve)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

static void BM_GaussHermite(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GaussHermite)->Arg(8)->Arg(32)->Arg(64);

static void BM_SpectralStep(benchmark::State& state) {
  const Grid g = Grid::periodic(40.0, static_cast<int>(state.range(0)));
  auto d = make_spectral(g, {heat(1.0, 1.0)});
  const auto st = d->stepper(1e-3);
  State u = d->encode(bump(g)), next;
  const State zero = d->zeros();
  for (auto _ : state) {
    st->advance(u, zero, zero, next);
    benchmark::DoNotOptimize(next.data());
  }
}
BENCHMARK(BM_SpectralStep)->Arg(256)->Arg(4096);

static void BM_SampleField(benchmark::State& state) {
  const Grid g = Grid::periodic(40.0, 256);
  auto d = make_spectral(g, {heat(1.0, 1.0)});
  auto p = SpdeProblem::deterministic(d, {static_cast<int>(state.range(0)), 8, 1}, {1.0, 100}, bump(g));
  const auto sol = solve(p);
  const auto co = GaussianCoordinates::sample(8, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_field(sol, co, 1.0));
}
BENCHMARK(BM_SampleField)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_FourthMoment(benchmark::State& state) {
  const IndexSet set({static_cast<int>(state.range(0)), 2, 2});
  std::vector<double> u(set.size());
  for (std::size_t a = 0; a < u.size(); ++a) u[a] = 1.0 / (1.0 + static_cast<double>(a));
  product_table(set);  // build the cached table outside the loop
  for (auto _ : state) benchmark::DoNotOptimize(fourth_moment(set, u, u, u, u));
}
BENCHMARK(BM_FourthMoment)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

static void BM_ZakaiSolve(benchmark::State& state) {
  const auto m = FilterModel::linear_gaussian(-1.0, 0.5, 1.0 / 3.0, 0.0, 0.25);
  const Grid g = Grid::interval(-3.0, 3.0, 61, Boundary::kDirichlet);
  const TruncationSpec s{static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(zakai_solve(m, s, {0.5, 200}, g));
}
BENCHMARK(BM_ZakaiSolve)->Args({2, 8})->Args({3, 8})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
