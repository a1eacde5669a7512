#include <algorithm>

#include "fracgame/errors.hpp"
#include "fracgame/kernels.hpp"

namespace fracgame::kernels {

namespace detail {

void check(std::span<const double> weights, std::span<const double> data, std::size_t dim, ConvolutionRange r,
           std::span<double> out) {
    if (dim == 0) throw ContractError("causal_convolution: dim must be positive");
    if (r.out_end < r.out_begin) throw ContractError("causal_convolution: empty output range reversed");
    if (out.size() < (r.out_end - r.out_begin) * dim) throw ContractError("causal_convolution: output too small");
    if (data.size() < r.in_end * dim) throw ContractError("causal_convolution: data shorter than input range");
    if (r.out_end > r.out_begin && r.out_end - 1 >= r.in_begin && weights.size() < r.out_end - r.in_begin)
        throw ContractError("causal_convolution: weight table too short");
}

// One output row; shared by both variants so the summation order is identical.
inline void convolve_row(std::span<const double> weights, const double* data, std::size_t dim, std::size_t n,
                         std::size_t in_begin, std::size_t in_end, double* row) {
    std::fill(row, row + dim, 0.0);
    if (n < in_begin) return;
    const std::size_t last = std::min(n + 1, in_end);
    for (std::size_t j = in_begin; j < last; ++j) {
        const double w = weights[n - j];
        const double* x = data + j * dim;
        for (std::size_t d = 0; d < dim; ++d) row[d] += w * x[d];
    }
}

}  // namespace detail

namespace serial {

void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange r, std::span<double> out) {
    detail::check(weights, data, dim, r, out);
    for (std::size_t n = r.out_begin; n < r.out_end; ++n)
        detail::convolve_row(weights, data.data(), dim, n, r.in_begin, r.in_end, out.data() + (n - r.out_begin) * dim);
}

}  // namespace serial

void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange range, std::span<double> out) {
    if (range.out_end - range.out_begin < kParallelThreshold)
        serial::causal_convolution(weights, data, dim, range, out);
    else
        omp::causal_convolution(weights, data, dim, range, out);
}

}  // namespace fracgame::kernels
