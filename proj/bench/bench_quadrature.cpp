// Serial reference vs OpenMP tensor-product quadrature.

#include <benchmark/benchmark.h>

#include <vector>

#include "combcalc/expr.hpp"
#include "combcalc/quadrature.hpp"
#include "combcalc/space.hpp"

namespace {

struct Problem {
    combcalc::CombSpace space{{2, 3}, 1};
    combcalc::CompiledExpr f{combcalc::parse("x1*x1_2 + sin(x2_2)*exp(x2_3) + x1^3*x2_3", space), space};
    std::vector<double> base = std::vector<double>(4, 0.5);
    std::vector<combcalc::Axis> axes{{0, 0.0, 1.0}, {1, 0.0, 1.0}, {2, 0.0, 1.0}, {3, 0.0, 1.0}};
};

void BM_Serial(benchmark::State& state) {
    Problem p;
    const combcalc::QuadratureOptions q{static_cast<int>(state.range(0)), 1};
    for (auto _ : state) benchmark::DoNotOptimize(combcalc::integrate_serial(p.f, p.base, p.axes, q));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
    Problem p;
    const combcalc::QuadratureOptions q{static_cast<int>(state.range(0)), 1};
    for (auto _ : state) benchmark::DoNotOptimize(combcalc::integrate_parallel(p.f, p.base, p.axes, q));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}

} // namespace

BENCHMARK(BM_Serial)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
