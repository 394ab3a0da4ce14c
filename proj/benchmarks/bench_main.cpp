#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cvfp/geometry.hpp"
#include "cvfp/langevin.hpp"
#include "cvfp/mckean.hpp"
#include "cvfp/rng.hpp"
#include "cvfp/vfp_solver.hpp"

namespace {

using namespace cvfp;

void BM_ConfinedStepInterval(benchmark::State& state) {
    const Domain domain = Domain::interval(1.0);
    const StepParams params = StepParams::with_defaults(0.01);
    RngStream rng(1, 0);
    PhaseState s{Vec{0.5}, Vec{0.0}};
    for (auto _ : state) {
        s = confined_step(domain, s, params, 1.0, rng).state;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConfinedStepInterval);

void BM_ConfinedStepDisc(benchmark::State& state) {
    const Domain domain = Domain::ball({0.0, 0.0}, 1.0);
    const StepParams params = StepParams::with_defaults(0.01);
    RngStream rng(2, 0);
    PhaseState s{Vec{0.0, 0.0}, Vec{0.0, 0.0}};
    for (auto _ : state) {
        s = confined_step(domain, s, params, 1.0, rng).state;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConfinedStepDisc);

void BM_McKeanStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Domain domain = Domain::interval(1.0);
    const KineticModel model{1.0, DriftFunction::tanh(1.0)};
    const StepParams params = StepParams::with_defaults(0.01);
    DriftEstimatorConfig cfg;
    Ensemble ensemble;
    std::vector<RngStream> streams;
    RngStream init(3, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ensemble.states.push_back({Vec{init.uniform()}, Vec{init.normal()}});
        streams.emplace_back(3, i + 1);
    }
    for (auto _ : state) {
        auto r = mckean_step(domain, ensemble, model, cfg, params, streams);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_McKeanStep)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SpecularSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const double vmax = 6.0, horizon = 0.1;
    const int steps = static_cast<int>(std::ceil(horizon * vmax * n));
    const PhaseGrid grid(1.0, n, 2 * n, vmax, horizon / steps, horizon);
    const auto f0 = sample_field(grid, [](double x, double u) {
        return (1.0 + 0.3 * std::cos(M_PI * x)) * std::exp(-u * u);
    });
    for (auto _ : state) {
        auto sol = solve_specular_linear(grid, f0, {}, 1.0);
        benchmark::DoNotOptimize(sol);
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_SpecularSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
