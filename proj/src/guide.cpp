#include "fracgame/guide.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracgame/errors.hpp"
#include "fracgame/fractional.hpp"

namespace fracgame::guide {

std::size_t GuideConfig::substeps() const {
    const double e = euler_step > 0.0 ? euler_step : h;
    const long long k = exact_ratio(h, e);
    if (k <= 0) throw ContractError("GuideConfig: euler_step must divide h");
    return static_cast<std::size_t>(k);
}

void GuideConfig::validate() const {
    if (!(h > 0.0)) throw ContractError("GuideConfig: h must be positive");
    frac::FractionalOrder check(alpha);
    (void)check;
    if (w0.empty()) throw ContractError("GuideConfig: w0 must be set");
    substeps();
}

namespace {

void ensure_gl(GuideState& g, std::size_t count) {
    if (g.gl.size() >= count) return;
    const double beta = 1.0 - g.config.alpha;
    if (g.gl.empty()) g.gl.push_back(1.0);
    while (g.gl.size() < count) {
        const double i = static_cast<double>(g.gl.size());
        g.gl.push_back(g.gl.back() * (i - 1.0 - beta) / i);
    }
}

void push_recon(GuideState& g) {
    const std::size_t K = g.config.substeps();
    const std::size_t m = (g.y.size() - 1) / K;
    ensure_gl(g, m + 1);
    const std::size_t n = g.y.dim();
    Vec x(n, 0.0);
    for (std::size_t i = 0; i <= m; ++i) {
        const auto yi = g.y[(m - i) * K];
        const double c = g.gl[i];
        for (std::size_t d = 0; d < n; ++d) x[d] += c * yi[d];
    }
    const double scale = std::pow(g.config.h, g.config.alpha - 1.0);
    for (std::size_t d = 0; d < n; ++d) x[d] = g.config.w0[d] + scale * x[d];
    const double xn = norm(x);
    if (!std::isfinite(xn) || xn > g.config.blowup_radius) {
        std::ostringstream os;
        os << "guide: reconstructed state norm " << xn << " exceeds the blow-up guard " << g.config.blowup_radius;
        throw NumericalError(os.str());
    }
    g.recon.push_back(x);
}

double euler(const GuideConfig& c) { return c.euler_step > 0.0 ? c.euler_step : c.h; }

}  // namespace

GuideState initial_guide_state(double t0, const GuideConfig& cfg) {
    cfg.validate();
    GuideState g;
    g.config = cfg;
    g.config.euler_step = euler(cfg);
    const std::size_t n = cfg.w0.size();
    g.y = SampledFunction(t0, g.config.euler_step, n);
    g.recon = SampledFunction(t0, cfg.h, n);
    g.y.push_back(Vec(n, 0.0));
    push_recon(g);
    return g;
}

GuideState initial_guide_segment(const dyn::Position& init, GuideConfig cfg, double growth, double R0) {
    if (init.w.empty()) throw ContractError("initial_guide_segment: empty history");
    cfg.w0 = init.initial();
    cfg.validate();
    const double e = euler(cfg);
    if (std::isfinite(growth) || std::isfinite(R0)) {
        const auto rep = dyn::check_admissible(init, growth, R0, cfg.alpha);
        if (!rep.admissible) throw ContractError("initial_guide_segment: initial position not admissible: " + rep.message);
    }
    GuideState g = initial_guide_state(init.t0(), cfg);
    if (init.w.size() == 1) return g;

    const long long stride = exact_ratio(e, init.step());
    if (stride <= 0) throw ContractError("initial_guide_segment: history step must divide the Euler step");
    const long long lattice = exact_ratio(init.t() - init.t0(), cfg.h);
    if (lattice < 0) throw ContractError("initial_guide_segment: t* must be a lattice point");

    SampledFunction shifted = init.w;
    const Vec w0 = init.initial();
    for (std::size_t k = 0; k < shifted.size(); ++k)
        for (std::size_t d = 0; d < w0.size(); ++d) shifted[k][d] -= w0[d];
    const SampledFunction r = frac::rl_integral(shifted, 1.0 - cfg.alpha).subsample(static_cast<std::size_t>(stride));

    const std::size_t K = g.config.substeps();
    for (std::size_t k = 1; k < r.size(); ++k) {
        g.y.push_back(r[k]);
        if (k % K == 0) push_recon(g);
    }
    return g;
}

std::span<const double> reconstruct_state_view(const GuideState& g, std::size_t lattice_index) {
    if (lattice_index >= g.recon.size()) throw ContractError("reconstruct_state: time beyond the guide state");
    return g.recon[lattice_index];
}

Vec reconstruct_state(const GuideState& g, double t) {
    const long long m = exact_ratio(t - g.t0(), g.config.h);
    if (m < 0) throw ContractError("reconstruct_state: time is not a lattice point");
    const auto v = reconstruct_state_view(g, static_cast<std::size_t>(m));
    return {v.begin(), v.end()};
}

void step_guide_inplace(GuideState& g, const dyn::Dynamics& dyn, std::span<const double> p,
                        std::span<const double> q, double until) {
    const double e = g.config.euler_step;
    const long long steps = exact_ratio(until - g.t(), e);
    if (steps <= 0) throw ContractError("step_guide: until must exceed t by a multiple of the Euler step");
    const std::size_t K = g.config.substeps();
    const std::size_t n = g.y.dim();
    Vec f(n), next(n);
    for (long long s = 0; s < steps; ++s) {
        const std::size_t k = g.y.size() - 1;
        const auto x = g.recon[k / K];
        dyn.eval(g.y.time(k), x, p, q, f);
        const auto yk = g.y[k];
        for (std::size_t d = 0; d < n; ++d) next[d] = yk[d] + e * f[d];
        g.y.push_back(next);
        if ((k + 1) % K == 0) push_recon(g);
    }
}

GuideState step_guide(const GuideState& g, const dyn::Dynamics& dyn, std::span<const double> p,
                      std::span<const double> q, double until) {
    GuideState out = g;
    step_guide_inplace(out, dyn, p, q, until);
    return out;
}

void truncate_guide(GuideState& g, std::size_t samples) {
    if (samples == 0 || samples > g.y.size()) throw ContractError("truncate_guide: bad sample count");
    g.y.truncate(samples);
    g.recon.truncate((samples - 1) / g.config.substeps() + 1);
}

GuideLipschitzReport guide_lipschitz_check(const GuideState& g, const dyn::SystemBounds& bounds) {
    GuideLipschitzReport r;
    r.bound = bounds.L1;
    r.tolerance = 1e-9 * (1.0 + bounds.L1);
    for (std::size_t k = 1; k < g.y.size(); ++k)
        r.max_quotient = std::max(r.max_quotient, distance(g.y[k], g.y[k - 1]) / g.y.step());
    r.holds = r.max_quotient <= r.bound + r.tolerance;
    return r;
}

GuideAdmissibilityReport guide_admissibility(const GuideState& g, double c_tilde) {
    GuideAdmissibilityReport r;
    r.starts_at_zero = norm(g.y[0]) == 0.0;
    double running = norm(g.y[0]);
    for (std::size_t k = 1; k < g.y.size(); ++k) {
        const double q = distance(g.y[k], g.y[k - 1]) / g.y.step();
        r.growth_ratio = std::max(r.growth_ratio, q / (1.0 + running));
        running = std::max(running, norm(g.y[k]));
    }
    for (std::size_t m = 0; m < g.recon.size(); ++m) r.max_recon_norm = std::max(r.max_recon_norm, norm(g.recon[m]));
    r.holds = r.starts_at_zero && r.growth_ratio <= c_tilde * (1.0 + 1e-9);
    return r;
}

namespace {

double directed(const SampledFunction& a, const SampledFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double dt = a.time(i) - b.time(j);
            const double dy = distance(a[i], b[j]);
            best = std::min(best, std::sqrt(dt * dt + dy * dy));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double guide_distance(const GuideState& a, const GuideState& b) {
    return std::max(directed(a.y, b.y), directed(b.y, a.y));
}

double guide_quality(const GuideState& g, const dyn::QualityIndex& sigma, double theta) {
    return sigma.evaluate(g.recon, theta);
}

}  // namespace fracgame::guide
