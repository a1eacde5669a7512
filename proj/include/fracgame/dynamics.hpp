#pragma once

// The controlled Caputo system  (^C D^alpha x)(t) = f(t, x(t), u(t), v(t)).

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracgame/fractional.hpp"
#include "fracgame/sampled.hpp"

namespace fracgame::dyn {

/// A compact control set, represented by a finite grid of distinct points.
class ControlSet {
public:
    ControlSet() = default;
    explicit ControlSet(std::vector<Vec> points);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return points_.empty() ? 0 : points_.front().size(); }
    const Vec& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Vec>& points() const noexcept { return points_; }
    double max_norm() const;
    /// Index of `value` in the grid; size() if absent.
    std::size_t find(std::span<const double> value) const;

private:
    std::vector<Vec> points_;
};

/// f(t, x, u, v) written into `out` (length n).
using RightHandSide = std::function<void(double t, std::span<const double> x, std::span<const double> u,
                                         std::span<const double> v, std::span<double> out)>;

class Dynamics {
public:
    Dynamics(std::string name, std::size_t dim, RightHandSide f, double growth, std::function<double(double)> lipschitz,
             bool separable);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    /// Constant c of the growth bound ||f|| <= (1 + ||x||) c.
    double growth() const noexcept { return growth_; }
    /// Lipschitz constant in x on the ball of radius R.
    double lipschitz(double radius) const { return lipschitz_(radius); }
    /// True when f = g1(t, x, u) + g2(t, x, v).
    bool separable() const noexcept { return separable_; }

    void eval(double t, std::span<const double> x, std::span<const double> u, std::span<const double> v,
              std::span<double> out) const {
        f_(t, x, u, v, out);
    }
    Vec operator()(double t, std::span<const double> x, std::span<const double> u, std::span<const double> v) const;

private:
    std::string name_;
    std::size_t dim_;
    RightHandSide f_;
    double growth_;
    std::function<double(double)> lipschitz_;
    bool separable_;
};

/// f = a x + b + u + v. Controls must have the state dimension.
Dynamics affine_dynamics(double a, Vec b, const ControlSet& U, const ControlSet& V);
/// f = drift * x / sqrt(1 + ||x||^2) + u - v.
Dynamics pursuit_dynamics(std::size_t dim, double drift, const ControlSet& U, const ControlSet& V);
/// Scalar f = u * v (controls scalar); does not satisfy the saddle-point condition in general.
Dynamics bilinear_dynamics(const ControlSet& U, const ControlSet& V);

/// Piecewise-constant control realization on [t_begin, t_end), right-continuous.
class ControlSignal {
public:
    ControlSignal() = default;
    /// Constant value on [t_begin, t_end).
    ControlSignal(double t_begin, double t_end, Vec value);
    /// values[i] holds on [switch_times[i], switch_times[i+1]) (or up to t_end).
    ControlSignal(std::vector<double> switch_times, std::vector<Vec> values, double t_end);

    /// A signal on the degenerate interval [t, t).
    static ControlSignal empty_at(double t);

    double t_begin() const noexcept { return t_begin_; }
    double t_end() const noexcept { return t_end_; }
    bool empty() const noexcept { return values_.empty(); }
    const std::vector<double>& switch_times() const noexcept { return times_; }
    const std::vector<Vec>& values() const noexcept { return values_; }

    /// Value in force at t; at t_end the last value is returned.
    const Vec& at(double t) const;
    /// Extend with `value` on [t_end, until).
    void append(double until, Vec value);

    friend bool operator==(const ControlSignal&, const ControlSignal&) = default;

private:
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    std::vector<double> times_;
    std::vector<Vec> values_;
};

/// Joins controls on [a, b) and [b, c) into one on [a, c). Throws ContractError
/// on a gap or overlap.
ControlSignal concatenate_controls(const ControlSignal& first, const ControlSignal& second);

/// A position (t, w(.)) with the generator of its history.
///
/// `phi` holds the right-limit samples of the Caputo derivative (^C D^alpha w)
/// and `phi_left` the left-limit samples; they differ only where a control
/// switches. Both live on the grid of `w`.
struct Position {
    SampledFunction w;
    SampledFunction phi;
    SampledFunction phi_left;

    double t() const noexcept { return w.t_end(); }
    double t0() const noexcept { return w.t0(); }
    double step() const noexcept { return w.step(); }
    Vec initial() const { return w.at(0); }
    Vec current() const { return w.at(w.size() - 1); }

    /// w constant on [t0, t_star]; phi = 0.
    static Position constant(double t0, double t_star, double step, const Vec& w0);
    /// w(t) = w0 + a (t - t0)^alpha; phi = a Gamma(alpha + 1).
    static Position power(double t0, double t_star, double step, const Vec& w0, const Vec& a, double alpha);
};

struct SystemBounds {
    double R0 = 0.0;
    double R1 = 0.0;
    double M1 = 0.0;
    double H1 = 0.0;
    double L1 = 0.0;
    double H = 0.0;
};

/// Growth bounds of admissible motions: R1 = (1 + R0) E_alpha((theta - t0)^alpha c) - 1,
/// M1 = (1 + R1) c, H1 = H M1 with H = 2 / Gamma(alpha + 1), and L1 = M1.
SystemBounds bound_constants(const Dynamics& dyn, double R0, double t0, double theta, double alpha);
SystemBounds bound_constants(double growth, double R0, double t0, double theta, double alpha);

struct AdmissibilityReport {
    bool admissible = true;
    double initial_norm = 0.0;
    /// max over samples of ||phi|| - (1 + ||w||) c (<= 0 when the growth relation holds)
    double growth_excess = 0.0;
    /// max ||w - w(t0) - I^alpha phi||
    double consistency_error = 0.0;
    std::string message;
};

struct AdmissibilityTolerance {
    double relative = 1e-8;
    /// Additional slack on the consistency residual, scaled by step^(1 + alpha).
    double consistency_factor = 10.0;
};

AdmissibilityReport check_admissible(const Position& pos, double growth, double R0, double alpha,
                                     const AdmissibilityTolerance& tol = {});

struct ConditionProbe {
    double t = 0.0;
    Vec x;
    Vec s;
};

struct IsaacsReport {
    double max_gap = 0.0;
    std::size_t worst_probe = 0;
    std::vector<double> gaps;
};

/// min_u max_v <s, f> - max_v min_u <s, f> on each probe (always >= 0 on grids).
IsaacsReport check_isaacs(const Dynamics& dyn, const ControlSet& U, const ControlSet& V,
                          std::span<const ConditionProbe> probes);

struct BoundProbeReport {
    /// max ||f|| / ((1 + ||x||) c); <= 1 when the growth condition holds
    double growth_ratio = 0.0;
    /// max ||f(x) - f(x')|| / (lambda(R) ||x - x'||); <= 1 when the Lipschitz condition holds
    double lipschitz_ratio = 0.0;
};

BoundProbeReport check_bounds(const Dynamics& dyn, const ControlSet& U, const ControlSet& V,
                              std::span<const ConditionProbe> probes, double radius);

struct SolverOptions {
    /// Abort when ||x|| exceeds this radius (10 R1 in game runs).
    double blowup_radius = std::numeric_limits<double>::infinity();
    bool check_admissibility = true;
    double R0 = std::numeric_limits<double>::infinity();
    AdmissibilityTolerance tolerance{};
};

/// Extends `init` to [t0, T] under controls u, v on [t*, T) by the
/// Adams-Bashforth-Moulton predictor-corrector applied to the Volterra form
///
///   x(t) = w(t0) + I^alpha[phi on [t0, t*], f(., x, u, v) on [t*, t]](t).
///
/// The grid is the one of init.w, or `grid_step` when init is a single
/// point. Control switch times must lie on the grid.
Position solve_caputo(const Dynamics& dyn, const Position& init, const ControlSignal& u, const ControlSignal& v,
                      double T, double alpha, double grid_step, const SolverOptions& opts = {});

/// Quality index sigma(x(.)) evaluated on a full motion.
class QualityIndex {
public:
    enum class Kind { TerminalLinear, TerminalNorm, RunningMaxNorm, Constant };

    static QualityIndex terminal_linear(Vec weights, double offset = 0.0);
    static QualityIndex terminal_norm();
    static QualityIndex running_max_norm();
    static QualityIndex constant(double value);

    Kind kind() const noexcept { return kind_; }
    std::string name() const;
    const Vec& weights() const noexcept { return weights_; }
    double offset() const noexcept { return offset_; }

    /// The motion must reach theta.
    double evaluate(const SampledFunction& x, double theta) const;
    /// Terminal cost mu(x(theta)) for terminal kinds.
    double terminal(std::span<const double> x_end) const;

private:
    Kind kind_ = Kind::Constant;
    Vec weights_;
    double offset_ = 0.0;
};

double evaluate_quality(const QualityIndex& sigma, const Position& x, double theta);

struct AprioriReport {
    double max_norm = 0.0;
    /// max over sampled pairs of ||x(t) - x(t')|| - H1 |t - t'|^alpha
    double holder_excess = 0.0;
    double tolerance = 0.0;
    bool holds = true;
};

/// ||x(t)|| <= R1 + tol and ||x(t) - x(t')|| <= H1 |t - t'|^alpha + tol with
/// tol = 10 step^alpha.
AprioriReport check_apriori_bounds(const SampledFunction& x, const SystemBounds& b, double alpha);

}  // namespace fracgame::dyn
