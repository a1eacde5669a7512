#pragma once

// Extremal-shift pre-strategies and the control-with-guide procedures.
//
// In the first procedure the minimizer steers the real system with u while
// running a guide driven by p (optimal guide law) and q (aimed at the real
// state); the second procedure is the mirror image for the maximizer.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracgame/dynamics.hpp"
#include "fracgame/game.hpp"
#include "fracgame/guide.hpp"

namespace fracgame::strat {

enum class Player { Minimizer, Maximizer };

/// Control-update mesh t* = tau_0 < tau_1 < ... < tau_k = theta.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<double> times);
    /// Uniform steps of length diam (which must divide theta - t_begin).
    static Partition uniform(double t_begin, double t_end, double diam);

    std::size_t steps() const noexcept { return times_.empty() ? 0 : times_.size() - 1; }
    double operator[](std::size_t j) const { return times_[j]; }
    const std::vector<double>& times() const noexcept { return times_; }
    double diameter() const;
    /// Throws ConfigError unless every node is t0 + (integer) * step.
    void require_aligned(double t0, double step, const char* what) const;

private:
    std::vector<double> times_;
};

struct ProcedureConfig {
    double h = 0.0;
    double epsilon = 0.0;
    Partition partition;
    double zeta = 0.0;
    /// Euler substep of the guide; zero means h.
    double euler_step = 0.0;
};

/// argmin over U of max over V of <s, f(t, x, u, v)>; lowest index on ties.
std::size_t pre_strategy_min(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V, double t,
                             std::span<const double> x, std::span<const double> s);
/// argmax over V of min over U of <s, f(t, x, u, v)>; lowest index on ties.
std::size_t pre_strategy_max(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V, double t,
                             std::span<const double> x, std::span<const double> s);

/// Pre-strategy of the guide game, evaluated at the reconstructed state x'(t).
/// Returns an index into U (Minimizer) or V (Maximizer).
std::size_t guide_pre_strategy(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V,
                               const guide::GuideState& g, double t, std::span<const double> s, Player who);

/// s = x(t) - x'(t).
Vec aiming_vector(const dyn::Position& x, const guide::GuideState& g, double t);

struct AimingChoice {
    /// Control of the real system (u for the first procedure, v for the second).
    std::size_t system = 0;
    /// Aimed guide control (q for the first procedure, p for the second).
    std::size_t guide = 0;
    Vec s;
};

/// u = nu_u(t, x(t), s), q = Lambda_q(t, y, s) with s = x(t) - x'(t).
AimingChoice mutual_aiming_first(const Game& game, const dyn::Position& x, const guide::GuideState& g, double t);
/// v = nu_v(t, x(t), s), p = Lambda_p(t, y, s) with s = x'(t) - x(t).
AimingChoice mutual_aiming_second(const Game& game, const dyn::Position& x, const guide::GuideState& g, double t);

/// The guide control not formed by aiming (p in the first procedure, q in the
/// second), chosen at partition node `step` from the current guide state.
using GuideLaw = std::function<std::size_t(const guide::GuideState& g, std::size_t step)>;

/// A law that replays fixed indices, one per partition step.
GuideLaw fixed_guide_law(std::vector<std::size_t> indices);

struct GameRunResult {
    dyn::Position x;
    guide::GuideState guide;
    dyn::ControlSignal u, v, p, q;
    double gamma = 0.0;
    double gamma_h = 0.0;
    /// ||x(t) - x'(t)|| on the h-lattice
    std::vector<double> deviation;
    double max_deviation = 0.0;
    /// ||s_j|| at each partition node
    std::vector<double> aiming_norms;
    dyn::AprioriReport apriori;
    guide::GuideLipschitzReport guide_lipschitz;
};

/// First procedure against an external realization v(.).
GameRunResult control_with_guide_first(const Game& game, const ProcedureConfig& cfg,
                                       const dyn::ControlSignal& v_realization, const GuideLaw& p_law);
/// Second procedure against an external realization u(.).
GameRunResult control_with_guide_second(const Game& game, const ProcedureConfig& cfg,
                                        const dyn::ControlSignal& u_realization, const GuideLaw& q_law);

/// Piecewise-constant realization taking values[indices[j]] on [tau_j, tau_{j+1}).
dyn::ControlSignal realization(const Partition& partition, const dyn::ControlSet& set,
                               const std::vector<std::size_t>& indices);

}  // namespace fracgame::strat
