#include "fracgame/sampled.hpp"

#include <sstream>

#include "fracgame/errors.hpp"

namespace fracgame {

SampledFunction::SampledFunction(double t0, double step, std::size_t dim) : t0_(t0), step_(step), dim_(dim) {
    if (!(step > 0.0)) throw ContractError("SampledFunction: step must be positive");
    if (dim == 0) throw ContractError("SampledFunction: dimension must be positive");
}

SampledFunction::SampledFunction(double t0, double step, std::size_t dim, std::vector<double> flat)
    : SampledFunction(t0, step, dim) {
    if (flat.size() % dim != 0) throw ContractError("SampledFunction: buffer size not a multiple of dim");
    data_ = std::move(flat);
}

void SampledFunction::push_back(std::span<const double> v) {
    if (v.size() != dim_) throw ContractError("SampledFunction::push_back: dimension mismatch");
    data_.insert(data_.end(), v.begin(), v.end());
}

bool SampledFunction::on_grid(double t) const noexcept {
    const double r = (t - t0_) / step_;
    const double k = std::round(r);
    return k >= 0.0 && std::abs(r - k) <= 1e-9 * std::max(1.0, k) && k < static_cast<double>(size());
}

std::size_t SampledFunction::index_of(double t) const {
    if (!on_grid(t)) {
        std::ostringstream os;
        os << "time " << t << " is not a grid point of [" << t0_ << ", " << t_end() << "] with step " << step_;
        throw ContractError(os.str());
    }
    return static_cast<std::size_t>(std::llround((t - t0_) / step_));
}

SampledFunction SampledFunction::subsample(std::size_t stride) const {
    if (stride == 0) throw ContractError("subsample: stride must be positive");
    SampledFunction out(t0_, step_ * static_cast<double>(stride), dim_);
    for (std::size_t k = 0; k < size(); k += stride) out.push_back((*this)[k]);
    return out;
}

long long exact_ratio(double a, double b) noexcept {
    if (!(b > 0.0) || a < 0.0) return -1;
    const double r = a / b;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, k)) return -1;
    return static_cast<long long>(k);
}

}  // namespace fracgame
