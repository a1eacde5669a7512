#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fracgame {

using Vec = std::vector<double>;

/// Values of an n-vector function on the uniform grid t0 + k*step, k = 0..N.
/// Samples are stored row-major in one flat buffer.
class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(double t0, double step, std::size_t dim);
    SampledFunction(double t0, double step, std::size_t dim, std::vector<double> flat);

    double t0() const noexcept { return t0_; }
    double step() const noexcept { return step_; }
    std::size_t dim() const noexcept { return dim_; }
    /// Number of samples (N + 1).
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return data_.empty(); }
    /// Time of the last sample.
    double t_end() const noexcept { return t0_ + static_cast<double>(size() - 1) * step_; }
    double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * step_; }

    std::span<const double> operator[](std::size_t k) const noexcept { return {data_.data() + k * dim_, dim_}; }
    std::span<double> operator[](std::size_t k) noexcept { return {data_.data() + k * dim_, dim_}; }
    Vec at(std::size_t k) const { auto s = (*this)[k]; return {s.begin(), s.end()}; }

    void push_back(std::span<const double> v);
    void truncate(std::size_t samples) { data_.resize(samples * dim_); }
    void reserve(std::size_t samples) { data_.reserve(samples * dim_); }

    /// Grid index of time t; throws ContractError if t is not on the grid.
    std::size_t index_of(double t) const;
    bool on_grid(double t) const noexcept;

    const std::vector<double>& flat() const noexcept { return data_; }
    std::vector<double>& flat() noexcept { return data_; }

    /// Keep every `stride`-th sample.
    SampledFunction subsample(std::size_t stride) const;

    friend bool operator==(const SampledFunction&, const SampledFunction&) = default;

private:
    double t0_ = 0.0;
    double step_ = 1.0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Sample a callable g(t) -> Vec on [t0, t0 + count*step].
template <class F>
SampledFunction sample(F&& g, double t0, double step, std::size_t intervals) {
    Vec first = g(t0);
    SampledFunction out(t0, step, first.size());
    out.reserve(intervals + 1);
    out.push_back(first);
    for (std::size_t k = 1; k <= intervals; ++k) out.push_back(g(t0 + static_cast<double>(k) * step));
    return out;
}

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Integer ratio a/b when a is (to rounding) an integer multiple of b; -1 otherwise.
long long exact_ratio(double a, double b) noexcept;

}  // namespace fracgame
