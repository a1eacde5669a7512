#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fracgame/kernels.hpp"

namespace fracgame::kernels {

namespace detail {
void check(std::span<const double>, std::span<const double>, std::size_t, ConvolutionRange, std::span<double>);
}

namespace omp {

void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange r, std::span<double> out) {
    detail::check(weights, data, dim, r, out);
    const double* w = weights.data();
    const double* x = data.data();
    double* o = out.data();
    const long long begin = static_cast<long long>(r.out_begin);
    const long long end = static_cast<long long>(r.out_end);
    // Later rows are longer; dynamic chunks keep threads balanced.
#pragma omp parallel for schedule(dynamic, 64)
    for (long long nn = begin; nn < end; ++nn) {
        const auto n = static_cast<std::size_t>(nn);
        double* row = o + (n - r.out_begin) * dim;
        std::fill(row, row + dim, 0.0);
        if (n < r.in_begin) continue;
        const std::size_t last = std::min(n + 1, r.in_end);
        for (std::size_t j = r.in_begin; j < last; ++j) {
            const double wj = w[n - j];
            const double* xj = x + j * dim;
            for (std::size_t d = 0; d < dim; ++d) row[d] += wj * xj[d];
        }
    }
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace omp
}  // namespace fracgame::kernels
