#include <benchmark/benchmark.h>

#include "recipfm/catalog.hpp"
#include "recipfm/expr.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/jet.hpp"
#include "recipfm/reciprocal.hpp"
#include "recipfm/special.hpp"

using namespace recipfm;

static void BM_JetMul(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 0.3 + 0.1 * static_cast<double>(i);
  const Point p(c);
  const Jet a = exp(Jet::coordinate(p, 0, 3));
  const Jet b = Jet::coordinate(p, n - 1, 3) + 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMul)->Arg(2)->Arg(3)->Arg(4)->Arg(8);

static void BM_ChristoffelAll(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const DiagonalSystem sys = epsilon_system(n, 1.0);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 + 0.4 * static_cast<double>(i);
  const Point p(c);
  for (auto _ : state) benchmark::DoNotOptimize(christoffel_primary_all(sys, p, 1));
}
BENCHMARK(BM_ChristoffelAll)->Arg(2)->Arg(3)->Arg(4);

static void BM_CurvatureNatural(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ConnectionTable c = natural_connection(epsilon_system(n, 1.0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 + 0.4 * static_cast<double>(i);
  const std::vector<Point> pts{Point(x)};
  for (auto _ : state) benchmark::DoNotOptimize(curvature_natural_residual(c, pts));
}
BENCHMARK(BM_CurvatureNatural)->Arg(2)->Arg(3)->Arg(4);

static void BM_CurvatureOracle(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ConnectionTable c = natural_connection(epsilon_system(n, 1.0));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 + 0.4 * static_cast<double>(i);
  const Point p(x);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_oracle(c, p));
}
BENCHMARK(BM_CurvatureOracle)->Arg(2)->Arg(3)->Arg(4);

static void BM_Hyp2f1Jet(benchmark::State& state) {
  const double z = static_cast<double>(state.range(0)) / 10.0;
  const Jet zj = Jet::coordinate(Point{z}, 0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hyp2f1(0.25, -0.25, 0.5, zj));
}
BENCHMARK(BM_Hyp2f1Jet)->Arg(1)->Arg(5)->Arg(9);

static void BM_FlatCoordinateField(benchmark::State& state) {
  const ScalarField A = catalog_entry("dim3-eps0.25-flatcoord1").A();
  const Point p{0.6, 1.6, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(A(p, 3));
}
BENCHMARK(BM_FlatCoordinateField);

static void BM_CurrentQuadrature(benchmark::State& state) {
  const DiagonalSystem sys = epsilon_system(2, 1.0);
  const ScalarField A = make_field("exp(u1)/(u2-u1)", 2);
  const Point base{2.0, 1.0};
  const Point p{1.5, -0.75};
  for (auto _ : state) benchmark::DoNotOptimize(current_value(sys, A, base, p));
}
BENCHMARK(BM_CurrentQuadrature);
BENCHMARK_MAIN();
