#include "fracgame/fractional.hpp"

#include <cmath>
#include <sstream>

#include "fracgame/errors.hpp"
#include "fracgame/kernels.hpp"

namespace fracgame::frac {

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "fractional order alpha must lie in (0, 1), got " << alpha;
        throw ContractError(os.str());
    }
}

std::vector<double> GLCoefficients::partial_sums() const {
    std::vector<double> s(coeffs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s[i] = (acc += coeffs[i]);
    return s;
}

GLCoefficients gl_coefficients(FractionalOrder order, std::size_t count) {
    if (count == 0) throw ContractError("gl_coefficients: count must be at least 1");
    GLCoefficients gl;
    gl.beta = order.beta();
    gl.coeffs.resize(count);
    gl.coeffs[0] = 1.0;
    for (std::size_t i = 1; i < count; ++i) {
        const double di = static_cast<double>(i);
        gl.coeffs[i] = gl.coeffs[i - 1] * (di - 1.0 - gl.beta) / di;
    }
    return gl;
}

namespace {

std::size_t lattice_stride(const SampledFunction& y, double h) {
    const long long r = exact_ratio(h, y.step());
    if (r <= 0) {
        std::ostringstream os;
        os << "GL step h = " << h << " is not a positive multiple of the sampling step " << y.step();
        throw ContractError(os.str());
    }
    return static_cast<std::size_t>(r);
}

}  // namespace

Vec fractional_difference(const SampledFunction& y, FractionalOrder order, double h, double t) {
    if (y.empty()) throw ContractError("fractional_difference: empty function");
    const std::size_t stride = lattice_stride(y, h);
    const std::size_t idx = y.index_of(t);
    const std::size_t terms = idx / stride + 1;
    const GLCoefficients gl = gl_coefficients(order, terms);
    Vec out(y.dim(), 0.0);
    for (std::size_t i = 0; i < terms; ++i) {
        auto yi = y[idx - i * stride];
        for (std::size_t d = 0; d < y.dim(); ++d) out[d] += gl.coeffs[i] * yi[d];
    }
    return out;
}

SampledFunction fractional_difference_lattice(const SampledFunction& y, FractionalOrder order, double h) {
    if (y.empty()) throw ContractError("fractional_difference_lattice: empty function");
    const SampledFunction lattice = y.subsample(lattice_stride(y, h));
    const std::size_t m = lattice.size();
    const GLCoefficients gl = gl_coefficients(order, m);
    std::vector<double> out(m * y.dim());
    kernels::causal_convolution(gl.coeffs, lattice.flat(), y.dim(), {0, m, 0, m}, out);
    return SampledFunction(y.t0(), lattice.step(), y.dim(), std::move(out));
}

double power_difference(double k, double p) {
    if (k <= 1.0) return std::pow(k, p);
    return -std::pow(k, p) * std::expm1(p * std::log1p(-1.0 / k));
}

ProductWeights product_weights(double a, std::size_t max_lag) {
    ProductWeights w;
    w.order = a;
    w.left.assign(max_lag + 1, 0.0);
    w.right.assign(max_lag + 1, 0.0);
    w.rect.assign(max_lag + 1, 0.0);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double kk = static_cast<double>(k);
        const double d_a = power_difference(kk, a);          // k^a - (k-1)^a
        const double d_a1 = power_difference(kk, a + 1.0);   // k^{a+1} - (k-1)^{a+1}
        w.rect[k] = d_a / a;
        w.left[k] = d_a1 / (a + 1.0) - (kk - 1.0) * d_a / a;
        w.right[k] = kk * d_a / a - d_a1 / (a + 1.0);
    }
    return w;
}

SampledFunction rl_integral(const SampledFunction& x, double order) {
    if (!(order > 0.0 && order < 1.0)) {
        std::ostringstream os;
        os << "rl_integral: order must lie in (0, 1), got " << order;
        throw ContractError(os.str());
    }
    if (x.empty()) throw ContractError("rl_integral: empty function");
    const std::size_t n = x.size();
    const std::size_t dim = x.dim();
    const ProductWeights pw = product_weights(order, n);

    // Sample j is the left end of interval j and the right end of interval j-1.
    std::vector<double> w(n);
    w[0] = pw.right[1];
    for (std::size_t k = 1; k < n; ++k) w[k] = pw.left[k] + pw.right[k + 1];

    std::vector<double> out(n * dim);
    kernels::causal_convolution(w, x.flat(), dim, {0, n, 0, n}, out);

    const double scale = std::pow(x.step(), order) / std::tgamma(order);
    auto x0 = x[0];
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t d = 0; d < dim; ++d) {
            // sample 0 has no interval to its left
            double v = out[k * dim + d] - pw.right[k + 1] * x0[d];
            out[k * dim + d] = (k == 0) ? 0.0 : scale * v;
        }
    return SampledFunction(x.t0(), x.step(), dim, std::move(out));
}

SampledFunction rl_integral_corrected(const SampledFunction& x, double order, double exponent) {
    if (!(exponent > 0.0 && exponent != 1.0)) throw ContractError("rl_integral_corrected: exponent must be positive and not 1");
    SampledFunction out = rl_integral(x, order);
    const std::size_t n = x.size();
    if (n < 3) return out;

    const double h = x.step();
    const SampledFunction probe = sample([&](double t) { return Vec{std::pow(t - x.t0(), exponent)}; }, x.t0(), h, n - 1);
    const SampledFunction rule = rl_integral(probe, order);
    const double ratio = std::tgamma(exponent + 1.0) / std::tgamma(exponent + order + 1.0);
    // weights (w, -w/2) on samples 1, 2 leave linear functions untouched
    const double denom = std::pow(h, exponent) * (1.0 - std::pow(2.0, exponent - 1.0));
    for (std::size_t k = 1; k < n; ++k) {
        const double exact = ratio * std::pow(probe.time(k) - x.t0(), exponent + order);
        const double w = (exact - rule[k][0]) / denom;
        for (std::size_t d = 0; d < x.dim(); ++d)
            out[k][d] += w * ((x[1][d] - x[0][d]) - 0.5 * (x[2][d] - x[0][d]));
    }
    return out;
}

SampledFunction caputo_derivative(const SampledFunction& x, FractionalOrder order) {
    if (x.size() < 2) throw ContractError("caputo_derivative: need at least 2 samples");
    const double a = order.alpha();
    const std::size_t n = x.size();
    const std::size_t dim = x.dim();

    std::vector<double> diffs((n - 1) * dim);
    for (std::size_t m = 0; m + 1 < n; ++m)
        for (std::size_t d = 0; d < dim; ++d) diffs[m * dim + d] = x[m + 1][d] - x[m][d];

    std::vector<double> b(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) b[j] = power_difference(static_cast<double>(j + 1), 1.0 - a);

    std::vector<double> conv((n - 1) * dim);
    kernels::causal_convolution(b, diffs, dim, {0, n - 1, 0, n - 1}, conv);

    const double scale = std::pow(x.step(), -a) / std::tgamma(2.0 - a);
    std::vector<double> out(n * dim, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t d = 0; d < dim; ++d) out[k * dim + d] = scale * conv[(k - 1) * dim + d];
    return SampledFunction(x.t0(), x.step(), dim, std::move(out));
}

double mittag_leffler(double alpha, double z, const MittagLefflerOptions& opts) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("mittag_leffler: alpha must lie in (0, 1]");
    if (!(std::abs(z) <= opts.max_abs_z)) {
        std::ostringstream os;
        os << "mittag_leffler: |z| = " << std::abs(z) << " exceeds the series-safety limit " << opts.max_abs_z;
        throw ContractError(os.str());
    }
    if (z == 0.0) return 1.0;

    const double log_abs_z = std::log(std::abs(z));
    double sum = 1.0;
    double max_term = 1.0;
    double prev = 1.0;
    for (std::size_t k = 1; k < opts.max_terms; ++k) {
        const double kk = static_cast<double>(k);
        double term = std::exp(kk * log_abs_z - std::lgamma(alpha * kk + 1.0));
        if (z < 0.0 && (k % 2 == 1)) term = -term;
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        if (!std::isfinite(sum)) throw NumericalError("mittag_leffler: series overflow");
        const bool decreasing = std::abs(term) < std::abs(prev);
        if (decreasing && std::abs(term) < opts.rel_tol * std::abs(sum)) {
            if (z < 0.0 && max_term > 1e6 * std::abs(sum))
                throw NumericalError("mittag_leffler: alternating series lost too many digits");
            return sum;
        }
        prev = term;
    }
    throw NumericalError("mittag_leffler: term cap exceeded before convergence");
}

}  // namespace fracgame::frac
