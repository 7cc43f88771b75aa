#include <benchmark/benchmark.h>

#include "riskbias/asymptotics.hpp"
#include "riskbias/confidence.hpp"
#include "riskbias/exact_bias.hpp"
#include "riskbias/simulation.hpp"
#include "riskbias/vc_bound.hpp"

using namespace riskbias;

static void BM_CellExpectation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ProblemSize size(n, 10);
    CellParams cell{0.07, 0.37};
    for (auto _ : state) {
        benchmark::DoNotOptimize(cell_expectation(cell, size, CellFunction::Bias));
    }
}
BENCHMARK(BM_CellExpectation)->Arg(20)->Arg(100)->Arg(1000);

static void BM_EnvelopeSolve(benchmark::State& state) {
    ProblemSize size(20, 10);
    double z = 0.11;
    for (auto _ : state) {
        benchmark::DoNotOptimize(envelope_at(size, z));
    }
}
BENCHMARK(BM_EnvelopeSolve);

static void BM_WorstDistribution(benchmark::State& state) {
    ProblemSize size(50, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(worst_distribution(0.12, size));
    }
}
BENCHMARK(BM_WorstDistribution);

static void BM_BiasKernel(benchmark::State& state) {
    double z = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bias_kernel(z));
        z += 1e-4;
        if (z > 2.0) z = 0.0;
    }
}
BENCHMARK(BM_BiasKernel);

static void BM_BiasKernelApprox(benchmark::State& state) {
    double z = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bias_kernel_approx(z));
        z += 1e-4;
        if (z > 2.0) z = 0.0;
    }
}
BENCHMARK(BM_BiasKernelApprox);

static void BM_VcSolve(benchmark::State& state) {
    ProblemSize size(50, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(vc_bias(0.2, size));
    }
}
BENCHMARK(BM_VcSolve);

static void BM_TrainTree(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int leaves = static_cast<int>(state.range(1));
    ContinuousModel model(2, 0.5, 0.2, 0.8);
    std::vector<LabeledPoint> pts = sample_continuous(model, n, 4711);
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_tree(pts, leaves));
    }
}
BENCHMARK(BM_TrainTree)->Args({50, 3})->Args({60, 3})->Args({200, 16});

static void BM_LooTree(benchmark::State& state) {
    ContinuousModel model(2, 0.5, 0.2, 0.8);
    std::vector<LabeledPoint> pts = sample_continuous(model, 50, 4711);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loo_tree(pts, 3));
    }
}
BENCHMARK(BM_LooTree);

static void BM_HistogramReplicate(benchmark::State& state) {
    ProblemSize size(20, 10);
    HistogramDistribution dist = worst_distribution(0.1, size);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SampleCounts counts = sample_histogram(dist, size, ++seed);
        benchmark::DoNotOptimize(loo_histogram(counts));
        benchmark::DoNotOptimize(empirical_risk_of(counts));
    }
}
BENCHMARK(BM_HistogramReplicate);

BENCHMARK_MAIN();
