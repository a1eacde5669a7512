#include "fracgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracgame/errors.hpp"
#include "fracgame/kernels.hpp"

namespace fracgame::dyn {

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

// ---------------------------------------------------------------------------
// ControlSet

ControlSet::ControlSet(std::vector<Vec> points) : points_(std::move(points)) {
    if (points_.empty()) throw ContractError("ControlSet: at least one point required");
    const std::size_t d = points_.front().size();
    if (d == 0) throw ContractError("ControlSet: points must have positive dimension");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != d) throw ContractError("ControlSet: points differ in dimension");
        for (std::size_t j = 0; j < i; ++j)
            if (points_[i] == points_[j]) throw ContractError("ControlSet: duplicate point");
    }
}

double ControlSet::max_norm() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, norm(p));
    return m;
}

std::size_t ControlSet::find(std::span<const double> value) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (std::equal(points_[i].begin(), points_[i].end(), value.begin(), value.end())) return i;
    return points_.size();
}

// ---------------------------------------------------------------------------
// Dynamics

Dynamics::Dynamics(std::string name, std::size_t dim, RightHandSide f, double growth,
                   std::function<double(double)> lipschitz, bool separable)
    : name_(std::move(name)), dim_(dim), f_(std::move(f)), growth_(growth), lipschitz_(std::move(lipschitz)),
      separable_(separable) {
    if (dim_ == 0) throw ContractError("Dynamics: dimension must be positive");
    if (!(growth_ >= 0.0)) throw ContractError("Dynamics: growth constant must be non-negative");
}

Vec Dynamics::operator()(double t, std::span<const double> x, std::span<const double> u,
                         std::span<const double> v) const {
    Vec out(dim_);
    f_(t, x, u, v, out);
    return out;
}

Dynamics affine_dynamics(double a, Vec b, const ControlSet& U, const ControlSet& V) {
    const std::size_t n = U.dim();
    if (V.dim() != n) throw ContractError("affine_dynamics: U and V must have the state dimension");
    if (b.empty()) b.assign(n, 0.0);
    if (b.size() != n) throw ContractError("affine_dynamics: offset has wrong dimension");
    const double bound = norm(b) + U.max_norm() + V.max_norm();
    const double c = std::max(std::abs(a), bound);
    auto f = [a, b](double, std::span<const double> x, std::span<const double> u, std::span<const double> v,
                    std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b[i] + u[i] + v[i];
    };
    return Dynamics("affine", n, f, c, [a](double) { return std::abs(a); }, true);
}

Dynamics pursuit_dynamics(std::size_t dim, double drift, const ControlSet& U, const ControlSet& V) {
    if (U.dim() != dim || V.dim() != dim) throw ContractError("pursuit_dynamics: controls must have the state dimension");
    const double c = std::abs(drift) + U.max_norm() + V.max_norm();
    auto f = [drift](double, std::span<const double> x, std::span<const double> u, std::span<const double> v,
                     std::span<double> out) {
        const double scale = drift / std::sqrt(1.0 + dot(x, x));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * x[i] + u[i] - v[i];
    };
    // x / sqrt(1 + |x|^2) is 1-Lipschitz
    return Dynamics("pursuit", dim, f, c, [drift](double) { return std::abs(drift); }, true);
}

Dynamics bilinear_dynamics(const ControlSet& U, const ControlSet& V) {
    if (U.dim() != 1 || V.dim() != 1) throw ContractError("bilinear_dynamics: scalar controls required");
    const double c = U.max_norm() * V.max_norm();
    auto f = [](double, std::span<const double>, std::span<const double> u, std::span<const double> v,
                std::span<double> out) { out[0] = u[0] * v[0]; };
    return Dynamics("bilinear", 1, f, c, [](double) { return 0.0; }, false);
}

// ---------------------------------------------------------------------------
// ControlSignal

ControlSignal::ControlSignal(double t_begin, double t_end, Vec value)
    : t_begin_(t_begin), t_end_(t_end), times_{t_begin}, values_{std::move(value)} {
    if (!(t_end > t_begin)) throw ContractError("ControlSignal: interval must be non-degenerate");
}

ControlSignal::ControlSignal(std::vector<double> switch_times, std::vector<Vec> values, double t_end)
    : t_end_(t_end), times_(std::move(switch_times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
        throw ContractError("ControlSignal: need one value per switch time");
    t_begin_ = times_.front();
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw ContractError("ControlSignal: switch times must increase");
    if (!(t_end_ > times_.back())) throw ContractError("ControlSignal: last switch must precede t_end");
}

ControlSignal ControlSignal::empty_at(double t) {
    ControlSignal s;
    s.t_begin_ = s.t_end_ = t;
    return s;
}

const Vec& ControlSignal::at(double t) const {
    if (values_.empty()) throw ContractError("ControlSignal::at: empty signal");
    if (t < t_begin_ && !same_time(t, t_begin_)) throw ContractError("ControlSignal::at: time before signal start");
    if (t > t_end_ && !same_time(t, t_end_)) throw ContractError("ControlSignal::at: time after signal end");
    auto it = std::upper_bound(times_.begin(), times_.end(), t, [](double a, double b) { return a < b && !same_time(a, b); });
    const std::size_t idx = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return values_[idx];
}

void ControlSignal::append(double until, Vec value) {
    if (!(until > t_end_) || same_time(until, t_end_)) throw ContractError("ControlSignal::append: must extend the interval");
    if (values_.empty()) {
        t_begin_ = t_end_;
    } else if (value == values_.back()) {
        t_end_ = until;
        return;
    }
    times_.push_back(t_end_);
    values_.push_back(std::move(value));
    t_end_ = until;
}

ControlSignal concatenate_controls(const ControlSignal& first, const ControlSignal& second) {
    if (!same_time(first.t_end(), second.t_begin())) {
        std::ostringstream os;
        os << "concatenate_controls: intervals do not abut (" << first.t_end() << " vs " << second.t_begin() << ")";
        throw ContractError(os.str());
    }
    if (second.empty()) return first;
    if (first.empty()) return second;
    ControlSignal out = first;
    const auto& times = second.switch_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double until = (i + 1 < times.size()) ? times[i + 1] : second.t_end();
        out.append(until, second.values()[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Position

Position Position::constant(double t0, double t_star, double step, const Vec& w0) {
    const long long m = exact_ratio(t_star - t0, step);
    if (m < 0) throw ContractError("Position::constant: t_star must be a grid point at or after t0");
    Position p{SampledFunction(t0, step, w0.size()), SampledFunction(t0, step, w0.size()),
               SampledFunction(t0, step, w0.size())};
    const Vec zero(w0.size(), 0.0);
    for (long long k = 0; k <= m; ++k) {
        p.w.push_back(w0);
        p.phi.push_back(zero);
        p.phi_left.push_back(zero);
    }
    return p;
}

Position Position::power(double t0, double t_star, double step, const Vec& w0, const Vec& a, double alpha) {
    if (a.size() != w0.size()) throw ContractError("Position::power: coefficient dimension mismatch");
    Position p = constant(t0, t_star, step, w0);
    const double g = std::tgamma(alpha + 1.0);
    for (std::size_t k = 0; k < p.w.size(); ++k) {
        const double tau = std::pow(static_cast<double>(k) * step, alpha);
        for (std::size_t d = 0; d < w0.size(); ++d) {
            p.w[k][d] = w0[d] + a[d] * tau;
            p.phi[k][d] = a[d] * g;
            p.phi_left[k][d] = a[d] * g;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Bounds and condition probes

SystemBounds bound_constants(double growth, double R0, double t0, double theta, double alpha) {
    if (!(R0 > 0.0)) throw ContractError("bound_constants: R0 must be positive");
    SystemBounds b;
    b.R0 = R0;
    frac::MittagLefflerOptions opts;
    opts.max_abs_z = 1e3;
    b.R1 = (1.0 + R0) * frac::mittag_leffler(alpha, std::pow(theta - t0, alpha) * growth, opts) - 1.0;
    b.M1 = (1.0 + b.R1) * growth;
    b.H = 2.0 / std::tgamma(alpha + 1.0);
    b.H1 = b.H * b.M1;
    b.L1 = b.M1;
    return b;
}

SystemBounds bound_constants(const Dynamics& dyn, double R0, double t0, double theta, double alpha) {
    return bound_constants(dyn.growth(), R0, t0, theta, alpha);
}

AdmissibilityReport check_admissible(const Position& pos, double growth, double R0, double alpha,
                                     const AdmissibilityTolerance& tol) {
    AdmissibilityReport r;
    if (pos.w.empty() || pos.phi.size() != pos.w.size() || pos.phi_left.size() != pos.w.size()) {
        r.admissible = false;
        r.message = "history and generator samples are inconsistent in length";
        return r;
    }
    r.initial_norm = norm(pos.w[0]);
    double max_phi = 0.0;
    r.growth_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pos.w.size(); ++k) {
        const double bound = (1.0 + norm(pos.w[k])) * growth;
        const double p = std::max(norm(pos.phi[k]), norm(pos.phi_left[k]));
        max_phi = std::max(max_phi, p);
        r.growth_excess = std::max(r.growth_excess, p - bound);
    }
    if (pos.w.size() > 1) {
        // Reconstruct w from its generator with the same product rule the solver uses.
        const std::size_t n = pos.w.size();
        const std::size_t dim = pos.w.dim();
        const auto pw = frac::product_weights(alpha, n);
        std::vector<double> wl(n, 0.0), wr(n, 0.0);
        for (std::size_t k = 1; k < n; ++k) wl[k] = pw.left[k];
        for (std::size_t k = 0; k + 1 < n; ++k) wr[k] = pw.right[k + 1];
        std::vector<double> sl((n - 1) * dim), sr((n - 1) * dim);
        kernels::causal_convolution(wl, pos.phi.flat(), dim, {1, n, 0, n - 1}, sl);
        kernels::causal_convolution(wr, pos.phi_left.flat(), dim, {1, n, 1, n}, sr);
        const double scale = std::pow(pos.step(), alpha) / std::tgamma(alpha);
        for (std::size_t k = 1; k < n; ++k)
            for (std::size_t d = 0; d < dim; ++d) {
                const double rec = pos.w[0][d] + scale * (sl[(k - 1) * dim + d] + sr[(k - 1) * dim + d]);
                r.consistency_error = std::max(r.consistency_error, std::abs(rec - pos.w[k][d]));
            }
    }
    const double scale_w = 1.0 + std::max(r.initial_norm, R0);
    if (r.initial_norm > R0 * (1.0 + tol.relative)) {
        r.admissible = false;
        r.message = "||w(t0)|| exceeds R0";
    } else if (r.growth_excess > tol.relative * (1.0 + max_phi)) {
        r.admissible = false;
        r.message = "generator violates the growth relation ||phi|| <= (1 + ||w||) c";
    } else if (r.consistency_error >
               tol.relative * scale_w + tol.consistency_factor * std::pow(pos.step(), 1.0 + alpha) * (1.0 + max_phi)) {
        r.admissible = false;
        r.message = "history is not w(t0) + I^alpha phi";
    }
    return r;
}

namespace {

struct SmallGame {
    double minmax;
    double maxmin;
};

SmallGame small_game(const Dynamics& dyn, const ControlSet& U, const ControlSet& V, const ConditionProbe& p) {
    Vec f(dyn.dim());
    std::vector<double> payoff(U.size() * V.size());
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t j = 0; j < V.size(); ++j) {
            dyn.eval(p.t, p.x, U[i], V[j], f);
            payoff[i * V.size() + j] = dot(p.s, f);
        }
    SmallGame g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < U.size(); ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < V.size(); ++j) mx = std::max(mx, payoff[i * V.size() + j]);
        g.minmax = std::min(g.minmax, mx);
    }
    for (std::size_t j = 0; j < V.size(); ++j) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < U.size(); ++i) mn = std::min(mn, payoff[i * V.size() + j]);
        g.maxmin = std::max(g.maxmin, mn);
    }
    return g;
}

}  // namespace

IsaacsReport check_isaacs(const Dynamics& dyn, const ControlSet& U, const ControlSet& V,
                          std::span<const ConditionProbe> probes) {
    if (probes.empty()) throw ContractError("check_isaacs: no probes");
    IsaacsReport r;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const SmallGame g = small_game(dyn, U, V, probes[k]);
        const double gap = g.minmax - g.maxmin;
        r.gaps.push_back(gap);
        if (gap > r.max_gap || k == 0) {
            r.max_gap = gap;
            r.worst_probe = k;
        }
    }
    return r;
}

BoundProbeReport check_bounds(const Dynamics& dyn, const ControlSet& U, const ControlSet& V,
                              std::span<const ConditionProbe> probes, double radius) {
    BoundProbeReport r;
    const double c = dyn.growth();
    const double lam = dyn.lipschitz(radius);
    Vec f(dyn.dim()), g(dyn.dim());
    for (const auto& p : probes)
        for (const auto& u : U.points())
            for (const auto& v : V.points()) {
                dyn.eval(p.t, p.x, u, v, f);
                const double fn = norm(f);
                const double bound = (1.0 + norm(p.x)) * c;
                if (fn > 0.0) r.growth_ratio = std::max(r.growth_ratio, bound > 0.0 ? fn / bound : 1e300);
                // pair x with its reflection x + s, clipped to the ball
                Vec x2(p.x);
                for (std::size_t i = 0; i < x2.size(); ++i) x2[i] += p.s[i];
                if (norm(x2) > radius || norm(p.x) > radius) continue;
                const double dx = distance(p.x, x2);
                if (dx == 0.0) continue;
                dyn.eval(p.t, x2, u, v, g);
                const double df = distance(f, g);
                if (df > 0.0) r.lipschitz_ratio = std::max(r.lipschitz_ratio, lam > 0.0 ? df / (lam * dx) : 1e300);
            }
    return r;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

void require_grid_switches(const ControlSignal& s, double t0, double g, const char* which) {
    for (double t : s.switch_times())
        if (exact_ratio(t - t0, g) < 0) {
            std::ostringstream os;
            os << "solve_caputo: " << which << " switches at " << t << ", off the solver grid";
            throw ContractError(os.str());
        }
}

}  // namespace

Position solve_caputo(const Dynamics& dyn, const Position& init, const ControlSignal& u, const ControlSignal& v,
                      double T, double alpha, double grid_step, const SolverOptions& opts) {
    const frac::FractionalOrder order(alpha);
    const std::size_t dim = dyn.dim();
    if (init.w.empty() || init.w.dim() != dim) throw ContractError("solve_caputo: initial position has wrong dimension");

    Position out = init;
    if (init.w.size() == 1 && init.w.step() != grid_step) {
        // a single-point history carries no grid of its own
        const Vec w0 = init.w.at(0);
        out.w = SampledFunction(init.t0(), grid_step, dim);
        out.w.push_back(w0);
        out.phi = SampledFunction(init.t0(), grid_step, dim);
        out.phi.push_back(init.phi[0]);
        out.phi_left = SampledFunction(init.t0(), grid_step, dim);
        out.phi_left.push_back(init.phi_left[0]);
    } else if (exact_ratio(grid_step, init.step()) != 1) {
        throw ContractError("solve_caputo: grid_step differs from the step of the initial history");
    }

    const double g = out.step();
    const double t0 = out.t0();
    const double t_star = out.t();
    const long long total = exact_ratio(T - t0, g);
    if (total < 0 || T < t_star) throw ContractError("solve_caputo: T must be a grid point not before t*");
    const std::size_t m = out.w.size() - 1;
    const std::size_t N = static_cast<std::size_t>(total);
    if (N == m) return out;

    if (u.empty() || v.empty()) throw ContractError("solve_caputo: controls must cover [t*, T)");
    if (u.t_begin() > t_star + 1e-12 || v.t_begin() > t_star + 1e-12 || u.t_end() < T - 1e-12 ||
        v.t_end() < T - 1e-12)
        throw ContractError("solve_caputo: controls must cover [t*, T)");
    require_grid_switches(u, t0, g, "u");
    require_grid_switches(v, t0, g, "v");

    if (opts.check_admissibility) {
        const auto rep = check_admissible(out, dyn.growth(), opts.R0, alpha, opts.tolerance);
        if (!rep.admissible) throw ContractError("solve_caputo: initial position not admissible: " + rep.message);
    }

    const auto pw = frac::product_weights(alpha, N + 1);
    const double scale = std::pow(g, alpha) / std::tgamma(alpha);
    const std::size_t steps = N - m;

    // Intervals j < m lie in the given history; their contribution to every
    // new node is one batch of independent convolutions.
    std::vector<double> hist_left(steps * dim, 0.0), hist_right(steps * dim, 0.0), hist_rect(steps * dim, 0.0);
    if (m > 0) {
        std::vector<double> right_shift(N + 1, 0.0);
        for (std::size_t k = 0; k + 1 <= N; ++k) right_shift[k] = pw.right[k + 1];
        const kernels::ConvolutionRange left_range{m + 1, N + 1, 0, m};
        kernels::causal_convolution(pw.left, out.phi.flat(), dim, left_range, hist_left);
        kernels::causal_convolution(pw.rect, out.phi.flat(), dim, left_range, hist_rect);
        kernels::causal_convolution(right_shift, out.phi_left.flat(), dim, {m + 1, N + 1, 1, m + 1}, hist_right);
    }

    out.w.reserve(N + 1);
    out.phi.reserve(N + 1);
    out.phi_left.reserve(N + 1);
    const Vec w0 = out.w.at(0);
    Vec x_pred(dim), x_new(dim), f_pred(dim), f_new(dim), f_start(dim);

    for (std::size_t n = m + 1; n <= N; ++n) {
        const double t_prev = t0 + static_cast<double>(n - 1) * g;
        const double t_n = t0 + static_cast<double>(n) * g;
        const Vec& uc = u.at(t_prev);
        const Vec& vc = v.at(t_prev);

        // right-limit generator at the start of the interval uses the control now in force
        dyn.eval(t_prev, out.w[n - 1], uc, vc, f_start);
        std::copy(f_start.begin(), f_start.end(), out.phi[n - 1].begin());

        const double* hl = hist_left.data() + (n - m - 1) * dim;
        const double* hr = hist_right.data() + (n - m - 1) * dim;
        const double* hp = hist_rect.data() + (n - m - 1) * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            double sp = hp[d], sc = hl[d] + hr[d];
            for (std::size_t j = m; j < n; ++j) {
                const double L = out.phi[j][d];
                sp += pw.rect[n - j] * L;
                sc += pw.left[n - j] * L;
                if (j + 1 < n) sc += pw.right[n - j] * out.phi_left[j + 1][d];
            }
            x_pred[d] = w0[d] + scale * sp;
            x_new[d] = sc;  // completed below
        }
        dyn.eval(t_n, x_pred, uc, vc, f_pred);
        for (std::size_t d = 0; d < dim; ++d) x_new[d] = w0[d] + scale * (x_new[d] + pw.right[1] * f_pred[d]);

        const double xn = norm(x_new);
        if (!std::isfinite(xn) || xn > opts.blowup_radius) {
            std::ostringstream os;
            os << "solve_caputo: ||x(" << t_n << ")|| = " << xn << " exceeds the blow-up guard " << opts.blowup_radius;
            throw NumericalError(os.str());
        }
        dyn.eval(t_n, x_new, uc, vc, f_new);
        out.w.push_back(x_new);
        out.phi_left.push_back(f_new);
        out.phi.push_back(f_new);  // replaced once the next control is known
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quality index

QualityIndex QualityIndex::terminal_linear(Vec weights, double offset) {
    QualityIndex q;
    q.kind_ = Kind::TerminalLinear;
    q.weights_ = std::move(weights);
    q.offset_ = offset;
    return q;
}

QualityIndex QualityIndex::terminal_norm() {
    QualityIndex q;
    q.kind_ = Kind::TerminalNorm;
    return q;
}

QualityIndex QualityIndex::running_max_norm() {
    QualityIndex q;
    q.kind_ = Kind::RunningMaxNorm;
    return q;
}

QualityIndex QualityIndex::constant(double value) {
    QualityIndex q;
    q.kind_ = Kind::Constant;
    q.offset_ = value;
    return q;
}

std::string QualityIndex::name() const {
    switch (kind_) {
        case Kind::TerminalLinear: return "terminal_linear";
        case Kind::TerminalNorm: return "terminal_norm";
        case Kind::RunningMaxNorm: return "running_max_norm";
        case Kind::Constant: return "constant";
    }
    return "unknown";
}

double QualityIndex::terminal(std::span<const double> x_end) const {
    switch (kind_) {
        case Kind::TerminalLinear:
            if (weights_.size() != x_end.size()) throw ContractError("QualityIndex: weight dimension mismatch");
            return dot(weights_, x_end) + offset_;
        case Kind::TerminalNorm: return norm(x_end);
        case Kind::Constant: return offset_;
        case Kind::RunningMaxNorm: throw ContractError("QualityIndex: running max is not a terminal cost");
    }
    return 0.0;
}

double QualityIndex::evaluate(const SampledFunction& x, double theta) const {
    if (x.empty() || std::abs(x.t_end() - theta) > 1e-9 * std::max(1.0, std::abs(theta)))
        throw ContractError("QualityIndex: motion does not reach the terminal time");
    if (kind_ == Kind::RunningMaxNorm) {
        double m = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, norm(x[k]));
        return m;
    }
    return terminal(x[x.size() - 1]);
}

double evaluate_quality(const QualityIndex& sigma, const Position& x, double theta) {
    return sigma.evaluate(x.w, theta);
}

AprioriReport check_apriori_bounds(const SampledFunction& x, const SystemBounds& b, double alpha) {
    AprioriReport r;
    r.tolerance = 10.0 * std::pow(x.step(), alpha);
    r.holder_excess = -std::numeric_limits<double>::infinity();
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) r.max_norm = std::max(r.max_norm, norm(x[i]));
    std::vector<double> lag_bound(n);
    for (std::size_t k = 0; k < n; ++k) lag_bound[k] = b.H1 * std::pow(static_cast<double>(k) * x.step(), alpha);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            r.holder_excess = std::max(r.holder_excess, distance(x[i], x[j]) - lag_bound[j - i]);
    if (n < 2) r.holder_excess = 0.0;
    r.holds = r.max_norm <= b.R1 + r.tolerance && r.holder_excess <= r.tolerance;
    return r;
}

}  // namespace fracgame::dyn
