#include <benchmark/benchmark.h>

#include <cmath>

#include "sqfn/kernel_io.hpp"
#include "sqfn/operators.hpp"

namespace {

sqfn::SampledFunction fixture(const sqfn::Grid& g) {
  return sqfn::sample(g, [](const sqfn::Point& x) { return std::exp(-x[0] * x[0]) * std::cos(5.0 * x[0]); });
}

void BM_Convolve(benchmark::State& state) {
  const double h = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  sqfn::Grid g(sqfn::Box::interval(-8.0, 8.0), h);
  sqfn::SampledFunction f = fixture(g);
  sqfn::SampledFunction k = sqfn::standard_bump(1)->sample_dilated(0.25, h);
  for (auto _ : state) benchmark::DoNotOptimize(sqfn::convolve(f, k));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Convolve)->DenseRange(6, 12, 2);

void BM_SquareFunction(benchmark::State& state) {
  sqfn::Grid g(sqfn::Box::interval(-16.0, 16.0), 1.0 / 32);
  sqfn::ThetaOperator op(sqfn::meanzero_spec(1, 2), g);
  std::vector<sqfn::SampledFunction> fs{fixture(g), fixture(g)};
  sqfn::ScaleGrid sg(1.0 / 64, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sqfn::square_function(op, fs, sg));
}
BENCHMARK(BM_SquareFunction)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
