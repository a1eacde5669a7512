#pragma once

// Discrete fractional operators on uniformly sampled trajectories.
//
// Conventions: an operator "of order a" acts on the grid of its input
// SampledFunction. Riemann-Liouville integrals use product-trapezoidal
// quadrature (exact for piecewise-linear integrands), Caputo derivatives use
// the L1 scheme, and Grunwald-Letnikov differences are evaluated on a lattice
// of step h that must be a whole multiple of the sampling step.

#include <cstddef>
#include <vector>

#include "fracgame/sampled.hpp"

namespace fracgame::frac {

/// Order alpha of the Caputo dynamics, strictly inside (0, 1).
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);

    double alpha() const noexcept { return alpha_; }
    /// Complementary order 1 - alpha used by the Grunwald-Letnikov difference.
    double beta() const noexcept { return 1.0 - alpha_; }

private:
    double alpha_;
};

/// Weights c_i = (-1)^i binom(beta, i) of the Grunwald-Letnikov difference.
struct GLCoefficients {
    double beta = 0.0;
    std::vector<double> coeffs;

    /// S_m = c_0 + ... + c_m for m = 0..size-1.
    std::vector<double> partial_sums() const;
};

/// c_0..c_{count-1} for beta = 1 - alpha, by c_i = c_{i-1} (i - 1 - beta) / i.
GLCoefficients gl_coefficients(FractionalOrder order, std::size_t count);

/// Undivided difference (Delta_h^{1-alpha} y)(t) = sum_{i=0}^{[(t-t0)/h]} c_i y(t - i h).
/// h must be a multiple of y.step() and t a grid point of y.
Vec fractional_difference(const SampledFunction& y, FractionalOrder order, double h, double t);

/// The same difference evaluated at every h-lattice point of y's domain.
/// Returned on the lattice t0 + m h.
SampledFunction fractional_difference_lattice(const SampledFunction& y, FractionalOrder order, double h);

/// (I^order x)(t) at every grid point, order in (0, 1). Value at t0 is 0.
SampledFunction rl_integral(const SampledFunction& x, double order);

/// rl_integral plus Lubich-type starting weights on samples 1 and 2, so that
/// the rule is exact for a + b (t - t0) + c (t - t0)^exponent. Solutions of
/// Caputo systems behave like (t - t0)^alpha near t0; without the correction
/// that term limits the accuracy at the first nodes to O(step^(exponent + order)).
SampledFunction rl_integral_corrected(const SampledFunction& x, double order, double exponent);

/// L1 approximation of (^C D^alpha x)(t) at every grid point; 0 at t0.
SampledFunction caputo_derivative(const SampledFunction& x, FractionalOrder order);

struct MittagLefflerOptions {
    /// Series-safety limit on |z|.
    double max_abs_z = 10.0;
    std::size_t max_terms = 20000;
    double rel_tol = 1e-14;
};

/// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1), alpha in (0, 1], by plain series.
/// Throws NumericalError if the term cap is hit or cancellation makes the
/// alternating series unreliable.
double mittag_leffler(double alpha, double z, const MittagLefflerOptions& opts = {});

/// Product-integration weights of the kernel (t - tau)^{a-1} over one grid
/// interval, in units of step^a (the 1/Gamma(a) factor is not included).
///
/// For the interval lying k steps behind the evaluation node (k >= 1):
///   left(k)  = int_{k-1}^{k} s^{a-1} (s - k + 1) ds   (weight of the interval's left sample)
///   right(k) = int_{k-1}^{k} s^{a-1} (k - s) ds       (weight of its right sample)
///   rect(k)  = left(k) + right(k) = (k^a - (k-1)^a) / a
struct ProductWeights {
    double order = 0.0;
    std::vector<double> left;   // index k, entry 0 unused
    std::vector<double> right;  // index k, entry 0 unused
    std::vector<double> rect;   // index k, entry 0 unused
};

ProductWeights product_weights(double order, std::size_t max_lag);

/// k^p - (k-1)^p without cancellation for large k.
double power_difference(double k, double p);

}  // namespace fracgame::frac
