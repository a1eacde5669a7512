#include <doctest.h>

#include <omp.h>

#include <random>
#include <vector>

#include "fracgame/errors.hpp"
#include "fracgame/kernels.hpp"

using namespace fracgame;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

// Direct transcription of the documented sum.
std::vector<double> naive(const std::vector<double>& w, const std::vector<double>& x, std::size_t dim,
                          kernels::ConvolutionRange r) {
    std::vector<double> out((r.out_end - r.out_begin) * dim, 0.0);
    for (std::size_t n = r.out_begin; n < r.out_end; ++n)
        for (std::size_t j = r.in_begin; j < r.in_end && j <= n; ++j)
            for (std::size_t d = 0; d < dim; ++d) out[(n - r.out_begin) * dim + d] += w[n - j] * x[j * dim + d];
    return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel convolutions are bit-identical") {
    const std::size_t n = 3000;
    for (std::size_t dim : {1u, 2u, 3u}) {
        const auto w = random_vector(n + 1, 7);
        const auto x = random_vector(n * dim, 11 + static_cast<unsigned>(dim));
        for (kernels::ConvolutionRange r : {kernels::ConvolutionRange{0, n, 0, n}, kernels::ConvolutionRange{500, n, 0, 400},
                                            kernels::ConvolutionRange{100, 2000, 50, 1500},
                                            kernels::ConvolutionRange{0, 10, 5, 10}}) {
            std::vector<double> a((r.out_end - r.out_begin) * dim), b(a.size()), c(a.size());
            kernels::serial::causal_convolution(w, x, dim, r, a);
            for (int threads : {1, 2, 4, 7}) {
                omp_set_num_threads(threads);
                kernels::omp::causal_convolution(w, x, dim, r, b);
                CHECK(a == b);
            }
            kernels::causal_convolution(w, x, dim, r, c);
            CHECK(a == c);
            CHECK(a == naive(w, x, dim, r));
        }
    }
    omp_set_num_threads(kernels::omp::max_threads());
}

TEST_CASE("outputs before the input window are zero") {
    const std::vector<double> w(20, 1.0);
    const std::vector<double> x(10, 2.0);
    std::vector<double> out(5, -1.0);
    kernels::serial::causal_convolution(w, x, 1, {0, 5, 5, 10}, out);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("a short weight table is rejected") {
    const std::vector<double> w(5, 1.0);
    const std::vector<double> x(10, 1.0);
    std::vector<double> out(10);
    CHECK_THROWS_AS(kernels::serial::causal_convolution(w, x, 1, {0, 10, 0, 10}, out), ContractError);
}

}  // TEST_SUITE
