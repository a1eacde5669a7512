#include "fracgame/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracgame/errors.hpp"

namespace fracgame::strat {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw ContractError("Partition: need at least two nodes");
    for (std::size_t j = 1; j < times_.size(); ++j)
        if (!(times_[j] > times_[j - 1])) throw ContractError("Partition: nodes must increase strictly");
}

Partition Partition::uniform(double t_begin, double t_end, double diam) {
    const long long k = exact_ratio(t_end - t_begin, diam);
    if (k <= 0) {
        std::ostringstream os;
        os << "Partition: step " << diam << " does not divide [" << t_begin << ", " << t_end << "]";
        throw ContractError(os.str());
    }
    std::vector<double> times(static_cast<std::size_t>(k) + 1);
    for (long long j = 0; j <= k; ++j) times[static_cast<std::size_t>(j)] = t_begin + static_cast<double>(j) * diam;
    times.back() = t_end;
    return Partition(std::move(times));
}

double Partition::diameter() const {
    double d = 0.0;
    for (std::size_t j = 1; j < times_.size(); ++j) d = std::max(d, times_[j] - times_[j - 1]);
    return d;
}

void Partition::require_aligned(double t0, double step, const char* what) const {
    for (double t : times_)
        if (exact_ratio(t - t0, step) < 0) {
            std::ostringstream os;
            os << "partition node " << t << " is not a multiple of " << step << " from " << t0;
            throw ConfigError(what, os.str());
        }
}

// ---------------------------------------------------------------------------
// Pre-strategies

std::size_t pre_strategy_min(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V, double t,
                             std::span<const double> x, std::span<const double> s) {
    Vec f(dyn.dim());
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < U.size(); ++i) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < V.size(); ++j) {
            dyn.eval(t, x, U[i], V[j], f);
            worst = std::max(worst, dot(s, f));
        }
        if (worst < best_val) {
            best_val = worst;
            best = i;
        }
    }
    return best;
}

std::size_t pre_strategy_max(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V, double t,
                             std::span<const double> x, std::span<const double> s) {
    Vec f(dyn.dim());
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < V.size(); ++j) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < U.size(); ++i) {
            dyn.eval(t, x, U[i], V[j], f);
            worst = std::min(worst, dot(s, f));
        }
        if (worst > best_val) {
            best_val = worst;
            best = j;
        }
    }
    return best;
}

std::size_t guide_pre_strategy(const dyn::Dynamics& dyn, const dyn::ControlSet& U, const dyn::ControlSet& V,
                               const guide::GuideState& g, double t, std::span<const double> s, Player who) {
    const Vec x = guide::reconstruct_state(g, t);
    return who == Player::Minimizer ? pre_strategy_min(dyn, U, V, t, x, s) : pre_strategy_max(dyn, U, V, t, x, s);
}

Vec aiming_vector(const dyn::Position& x, const guide::GuideState& g, double t) {
    const std::size_t k = x.w.index_of(t);
    const Vec xr = guide::reconstruct_state(g, t);
    Vec s(xr.size());
    for (std::size_t d = 0; d < s.size(); ++d) s[d] = x.w[k][d] - xr[d];
    return s;
}

AimingChoice mutual_aiming_first(const Game& game, const dyn::Position& x, const guide::GuideState& g, double t) {
    AimingChoice c;
    c.s = aiming_vector(x, g, t);
    const auto xt = x.w[x.w.index_of(t)];
    c.system = pre_strategy_min(game.dyn, game.U, game.V, t, xt, c.s);
    c.guide = guide_pre_strategy(game.dyn, game.U, game.V, g, t, c.s, Player::Maximizer);
    return c;
}

AimingChoice mutual_aiming_second(const Game& game, const dyn::Position& x, const guide::GuideState& g, double t) {
    AimingChoice c;
    c.s = aiming_vector(x, g, t);
    for (double& v : c.s) v = -v;
    const auto xt = x.w[x.w.index_of(t)];
    c.system = pre_strategy_max(game.dyn, game.U, game.V, t, xt, c.s);
    c.guide = guide_pre_strategy(game.dyn, game.U, game.V, g, t, c.s, Player::Minimizer);
    return c;
}

GuideLaw fixed_guide_law(std::vector<std::size_t> indices) {
    return [indices = std::move(indices)](const guide::GuideState&, std::size_t step) {
        if (step >= indices.size()) throw ContractError("fixed_guide_law: step beyond the recorded indices");
        return indices[step];
    };
}

dyn::ControlSignal realization(const Partition& partition, const dyn::ControlSet& set,
                               const std::vector<std::size_t>& indices) {
    if (indices.size() != partition.steps()) throw ContractError("realization: one index per partition step required");
    dyn::ControlSignal out = dyn::ControlSignal::empty_at(partition[0]);
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= set.size()) throw ContractError("realization: index outside the control grid");
        out.append(partition[j + 1], set[indices[j]]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Procedures

namespace {

enum class Side { First, Second };

void check_config(const Game& game, const ProcedureConfig& cfg) {
    if (!(cfg.h > 0.0)) throw ConfigError("h", "must be positive");
    if (cfg.partition.steps() == 0) throw ConfigError("diam", "partition is empty");
    const auto& P = cfg.partition;
    if (std::abs(P[0] - game.t_star()) > 1e-12 || std::abs(P[P.steps()] - game.theta) > 1e-12)
        throw ConfigError("diam", "partition must span [t*, theta]");
    P.require_aligned(game.t0, cfg.h, "diam");
    if (exact_ratio(cfg.h, game.grid_step) <= 0) throw ConfigError("h", "must be a multiple of the solver grid step");
    if (exact_ratio(game.t_star() - game.t0, cfg.h) < 0) throw ConfigError("h", "t* must be a lattice point");
}

void check_external(const dyn::ControlSignal& s, const dyn::ControlSet& set, const Game& game, const char* name) {
    if (s.empty() || s.t_begin() > game.t_star() + 1e-12 || s.t_end() < game.theta - 1e-12)
        throw ContractError(std::string("external realization ") + name + " must cover [t*, theta)");
    for (const auto& v : s.values())
        if (set.find(v) == set.size()) throw ContractError(std::string("external realization ") + name + " leaves its grid");
}

GameRunResult run(const Game& game, const ProcedureConfig& cfg, Side side, const dyn::ControlSignal& external,
                  const GuideLaw& law) {
    check_config(game, cfg);
    const auto bounds = game.bounds();
    const double guard = 10.0 * bounds.R1;

    guide::GuideConfig gc;
    gc.w0 = game.init.initial();
    gc.h = cfg.h;
    gc.alpha = game.alpha;
    gc.euler_step = cfg.euler_step;
    gc.blowup_radius = guard;

    GameRunResult r;
    r.guide = guide::initial_guide_segment(game.init, gc);
    r.x = game.init;
    dyn::SolverOptions opts;
    opts.blowup_radius = guard;
    opts.R0 = game.R0;

    const double ts = game.t_star();
    r.u = r.v = r.p = r.q = dyn::ControlSignal::empty_at(ts);
    const auto& P = cfg.partition;
    for (std::size_t j = 0; j < P.steps(); ++j) {
        const double tau = P[j];
        const double next = P[j + 1];
        const AimingChoice a = side == Side::First ? mutual_aiming_first(game, r.x, r.guide, tau)
                                                   : mutual_aiming_second(game, r.x, r.guide, tau);
        const std::size_t other = law(r.guide, j);
        r.aiming_norms.push_back(norm(a.s));

        Vec u, v, p, q;
        if (side == Side::First) {
            if (other >= game.U.size()) throw ContractError("guide law returned an index outside U");
            u = game.U[a.system];
            v = external.at(tau);
            p = game.U[other];
            q = game.V[a.guide];
        } else {
            if (other >= game.V.size()) throw ContractError("guide law returned an index outside V");
            u = external.at(tau);
            v = game.V[a.system];
            p = game.U[a.guide];
            q = game.V[other];
        }
        const dyn::ControlSignal own(tau, next, side == Side::First ? u : v);
        const dyn::ControlSignal& us = side == Side::First ? own : external;
        const dyn::ControlSignal& vs = side == Side::First ? external : own;
        r.x = dyn::solve_caputo(game.dyn, r.x, us, vs, next, game.alpha, game.grid_step, opts);
        opts.check_admissibility = false;
        guide::step_guide_inplace(r.guide, game.dyn, p, q, next);

        if (side == Side::First) r.u.append(next, u); else r.v.append(next, v);
        r.p.append(next, p);
        r.q.append(next, q);
    }
    if (side == Side::First) r.v = external; else r.u = external;

    r.gamma = dyn::evaluate_quality(game.sigma, r.x, game.theta);
    r.gamma_h = guide::guide_quality(r.guide, game.sigma, game.theta);
    const auto stride = static_cast<std::size_t>(exact_ratio(cfg.h, r.x.step()));
    for (std::size_t m = 0; m < r.guide.recon.size(); ++m) {
        const double d = distance(r.x.w[m * stride], r.guide.recon[m]);
        r.deviation.push_back(d);
        r.max_deviation = std::max(r.max_deviation, d);
    }
    r.apriori = dyn::check_apriori_bounds(r.x.w, bounds, game.alpha);
    r.guide_lipschitz = guide::guide_lipschitz_check(r.guide, bounds);
    return r;
}

}  // namespace

GameRunResult control_with_guide_first(const Game& game, const ProcedureConfig& cfg,
                                       const dyn::ControlSignal& v_realization, const GuideLaw& p_law) {
    check_external(v_realization, game.V, game, "v");
    return run(game, cfg, Side::First, v_realization, p_law);
}

GameRunResult control_with_guide_second(const Game& game, const ProcedureConfig& cfg,
                                        const dyn::ControlSignal& u_realization, const GuideLaw& q_law) {
    check_external(u_realization, game.U, game, "u");
    return run(game, cfg, Side::Second, u_realization, q_law);
}

}  // namespace fracgame::strat
