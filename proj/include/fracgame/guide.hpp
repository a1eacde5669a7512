#pragma once

// The approximating retarded system
//
//     dy/dt = f(t, w0 + h^(alpha-1) (Delta_h^(1-alpha) y)(t), p, q),   y(t0) = 0,
//
// integrated by explicit Euler substeps. The reconstructed state
// x'(t) = w0 + h^(alpha-1) (Delta_h^(1-alpha) y)(t) is cached at the h-lattice
// points reached so far and held constant between them.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fracgame/dynamics.hpp"
#include "fracgame/sampled.hpp"

namespace fracgame::guide {

struct GuideConfig {
    Vec w0;
    double h = 0.0;
    double alpha = 0.5;
    /// Euler substep; must divide h. Defaults to h when zero.
    double euler_step = 0.0;
    double blowup_radius = std::numeric_limits<double>::infinity();

    /// Substeps per lattice interval.
    std::size_t substeps() const;
    void validate() const;
};

struct GuideState {
    GuideConfig config;
    /// y on the Euler grid t0 + k * euler_step.
    SampledFunction y;
    /// Reconstructed state at lattice points t0 + m h, m = 0 .. floor((t - t0) / h).
    SampledFunction recon;
    /// Grunwald-Letnikov weights, grown on demand.
    std::vector<double> gl;

    double t() const noexcept { return y.t_end(); }
    double t0() const noexcept { return y.t0(); }
    std::size_t lattice_index() const noexcept { return recon.size() - 1; }
};

/// Guide at t0 with y(t0) = 0.
GuideState initial_guide_state(double t0, const GuideConfig& cfg);

/// r*(t) = (I^(1-alpha)(w* - w*(t0)))(t) on [t0, t*], sampled on the Euler grid.
/// init.w.step() must divide the Euler step and t* must be a lattice point.
/// cfg.w0 is replaced by w*(t0).
GuideState initial_guide_segment(const dyn::Position& init, GuideConfig cfg,
                                 double growth = std::numeric_limits<double>::infinity(),
                                 double R0 = std::numeric_limits<double>::infinity());

/// x'(t) at a lattice time t <= g.t().
Vec reconstruct_state(const GuideState& g, double t);
std::span<const double> reconstruct_state_view(const GuideState& g, std::size_t lattice_index);

/// Advances y to `until` under constant p, q.
void step_guide_inplace(GuideState& g, const dyn::Dynamics& dyn, std::span<const double> p,
                        std::span<const double> q, double until);
GuideState step_guide(const GuideState& g, const dyn::Dynamics& dyn, std::span<const double> p,
                      std::span<const double> q, double until);

/// Restores the state that had `samples` Euler samples (undo of step_guide_inplace).
void truncate_guide(GuideState& g, std::size_t samples);

struct GuideLipschitzReport {
    double max_quotient = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool holds = true;
};

/// max |y(t_{k+1}) - y(t_k)| / euler_step against L1.
GuideLipschitzReport guide_lipschitz_check(const GuideState& g, const dyn::SystemBounds& bounds);

struct GuideAdmissibilityReport {
    /// max over samples of |dy| / (1 + max_{xi <= tau} |y(xi)|), an empirical c~_h
    double growth_ratio = 0.0;
    /// max |x'| seen on the lattice, an empirical R2
    double max_recon_norm = 0.0;
    bool starts_at_zero = true;
    bool holds = true;
};

GuideAdmissibilityReport guide_admissibility(const GuideState& g, double c_tilde);

/// Hausdorff distance between the graphs of two guide histories, evaluated on samples.
double guide_distance(const GuideState& a, const GuideState& b);

/// sigma applied to the reconstructed state on the lattice; requires g.t() == theta.
double guide_quality(const GuideState& g, const dyn::QualityIndex& sigma, double theta);

}  // namespace fracgame::guide
