#include "roughbsde/decorated.hpp"
#include "roughbsde/drivers.hpp"
#include "roughbsde/marcus.hpp"
#include "roughbsde/metric.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/rbsde.hpp"
#include "roughbsde/young.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace roughbsde;

namespace {

GridPath random_walk(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0 / std::sqrt(n));
    std::vector<double> t, x{0.0};
    for (int i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) / n);
    for (int i = 0; i < n; ++i) x.push_back(x.back() + N(rng));
    return GridPath::continuous_scalar(t, x);
}

Problem linear_jump_problem(JumpMode mode) {
    Problem pr;
    pr.g = VectorField::linear({Mat::Identity(1, 1)});
    pr.xi = Terminal::affine(scalar_vec(1.0), scalar_vec(0.5));
    pr.W = pure_jump(1.0, {{0.4, std::log(2.0)}});
    pr.mode = mode;
    return pr;
}

}  // namespace

static void BM_PVariation(benchmark::State& state) {
    const GridPath x = random_walk(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(p_variation(x, 2.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PVariation)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_BackwardYoung(benchmark::State& state) {
    const GridPath x = random_walk(static_cast<int>(state.range(0)), 2);
    const GridPath y = random_walk(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(backward_young(x, y, Anchor::Left, {2.5, 1.5}).total);
}
BENCHMARK(BM_BackwardYoung)->RangeMultiplier(4)->Range(64, 4096);

static void BM_MarcusFlowRK4(benchmark::State& state) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.8), Mat::Constant(1, 1, 0.1));
    for (auto _ : state)
        benchmark::DoNotOptimize(flow(g, 0.0, scalar_vec(1.0), scalar_vec(0.3), 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MarcusFlowRK4)->Arg(16)->Arg(64)->Arg(256);

static void BM_SolveMarcus(benchmark::State& state) {
    const Problem pr = linear_jump_problem(JumpMode::Marcus);
    TreeConfig tc;
    tc.steps = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_rbsde(pr, tc).y0());
}
BENCHMARK(BM_SolveMarcus)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_TimeStretch(benchmark::State& state) {
    const Problem pr = linear_jump_problem(JumpMode::Forward);
    for (auto _ : state) benchmark::DoNotOptimize(time_stretched_solve(pr, 0.1, {100}).max_difference);
}
BENCHMARK(BM_TimeStretch)->Unit(benchmark::kMillisecond);

static void BM_AlphaUpper(benchmark::State& state) {
    const GridPath w = pure_jump(1.0, {{0.4, std::log(2.0)}});
    const GridPath wk = wong_zakai(w, 1.0 / static_cast<double>(state.range(0)));
    const DecoratedPath a = embed_iota(wk), b = embed_jmath(w);
    for (auto _ : state) benchmark::DoNotOptimize(alpha_p_upper(a, b, 1.0, {0.01}, {4, 1, 12}).value);
}
BENCHMARK(BM_AlphaUpper)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_FbmSample(benchmark::State& state) {
    const FbmSampler s(0.75, static_cast<int>(state.range(0)), 1.0);
    std::mt19937_64 rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng).horizon());
}
BENCHMARK(BM_FbmSample)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
