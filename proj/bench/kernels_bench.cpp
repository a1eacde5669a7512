#include <benchmark/benchmark.h>

#include <omp.h>

#include <cmath>
#include <vector>

#include "fracgame/kernels.hpp"

using namespace fracgame;

namespace {

struct Workload {
    std::vector<double> weights, data, out;
    std::size_t n, dim;

    Workload(std::size_t n_, std::size_t dim_) : weights(n_ + 1), data(n_ * dim_), out(n_ * dim_), n(n_), dim(dim_) {
        // Grunwald-Letnikov weights of order 0.5
        weights[0] = 1.0;
        for (std::size_t i = 1; i <= n; ++i) weights[i] = weights[i - 1] * (1.0 - 1.5 / static_cast<double>(i));
        for (std::size_t k = 0; k < data.size(); ++k) data[k] = std::sin(0.001 * static_cast<double>(k));
    }

    kernels::ConvolutionRange range() const { return {0, n, 0, n}; }
};

void BM_serial(benchmark::State& state) {
    Workload w(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        kernels::serial::causal_convolution(w.weights, w.data, w.dim, w.range(), w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_omp(benchmark::State& state) {
    Workload w(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const int saved = kernels::omp::max_threads();
    omp_set_num_threads(static_cast<int>(state.range(2)));
    for (auto _ : state) {
        kernels::omp::causal_convolution(w.weights, w.data, w.dim, w.range(), w.out);
        benchmark::DoNotOptimize(w.out.data());
    }
    omp_set_num_threads(saved);
    state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_serial)->ArgsProduct({{1 << 10, 1 << 12, 1 << 14}, {1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_omp)
    ->ArgsProduct({{1 << 10, 1 << 12, 1 << 14}, {1, 2}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();

BENCHMARK_MAIN();
