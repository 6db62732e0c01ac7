#include "lagconn/connection.hpp"
#include "lagconn/geodesic.hpp"
#include "lagconn/kernels.hpp"
#include "lagconn/random.hpp"

#include <benchmark/benchmark.h>

using namespace lagconn;

namespace {

ExecPolicy policy_of(const benchmark::State& st) { return st.range(0) ? ExecPolicy::Parallel : ExecPolicy::Serial; }

ChartSpec chart6() {
  return ChartSpec({"q1", "q2", "q3", "p1", "p2", "p3"}, {0, 1, 2}, {}, {3, 4, 5});
}

void BM_Curvature(benchmark::State& st) {
  Rng rng(1);
  const Connection n = random_connection(6, 2, rng, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(curvature(n, policy_of(st)));
}

void BM_Torsion(benchmark::State& st) {
  Rng rng(2);
  const Connection n = random_connection(6, 2, rng, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(torsion(n, policy_of(st)));
}

void BM_Symplectize(benchmark::State& st) {
  Rng rng(3);
  const DifferentialForm w = random_closed_symplectic(chart6(), 1, rng);
  const Connection n = random_connection(6, 1, rng, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(symplectize(n, w, SymplectizeFormula::General, policy_of(st)));
}

void BM_GeodesicBatch(benchmark::State& st) {
  const ChartSpec c = chart6();
  GeometricStructure s;
  s.chart = c;
  s.L = {3, 4, 5};
  DifferentialForm w(6, 2);
  w.add({0, 3}, c.parse("1"));
  w.add({1, 4}, c.parse("1+p1^2"));
  w.add({2, 5}, c.parse("1"));
  s.form = w;
  const GeodesicSystem sys(c, bott_connection(s), s.L);
  std::vector<std::vector<double>> qs, us;
  for (int i = 0; i < 256; ++i) {
    qs.push_back({0.01 * i, 0.0, 0.0, 0.0, 0.0, 0.0});
    us.push_back({0.3, 0.1, -0.2 + 0.001 * i});
  }
  for (auto _ : st) benchmark::DoNotOptimize(integrate_batch(sys, qs, us, 1.0, 256, policy_of(st)));
}

}  // namespace

BENCHMARK(BM_Curvature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Torsion)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Symplectize)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeodesicBatch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
