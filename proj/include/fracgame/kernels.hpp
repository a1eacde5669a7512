#pragma once

// Memory-term kernels shared by every fractional operator in the library.
//
// All discrete fractional operators here reduce to a causal convolution of a
// weight table with a sampled history:
//
//     out[n] = sum_{j = in_begin}^{min(n, in_end - 1)} w[n - j] * data[j]
//
// for n in [out_begin, out_end). Each output is an independent dot product, so
// the OpenMP variant splits the output range across threads while every
// individual sum keeps the serial summation order. Results are therefore
// bit-identical between the two variants and across thread counts.

#include <cstddef>
#include <span>

namespace fracgame::kernels {

struct ConvolutionRange {
    std::size_t out_begin = 0;
    std::size_t out_end = 0;
    std::size_t in_begin = 0;
    std::size_t in_end = 0;
};

namespace serial {

/// `data` holds samples row-major with `dim` components; `out` receives
/// (out_end - out_begin) rows. weights.size() must exceed out_end - 1 - in_begin.
void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange range, std::span<double> out);

}  // namespace serial

namespace omp {

void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange range, std::span<double> out);

/// Threads the OpenMP runtime would use for a parallel region.
int max_threads();

}  // namespace omp

/// Outputs below this count stay on the serial path; thread start-up
/// dominates short convolutions.
inline constexpr std::size_t kParallelThreshold = 256;

/// Dispatching entry point used by the library.
void causal_convolution(std::span<const double> weights, std::span<const double> data, std::size_t dim,
                        ConvolutionRange range, std::span<double> out);

}  // namespace fracgame::kernels
