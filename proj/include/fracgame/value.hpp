#pragma once

// Value of the discretized guide game by exact minimax over per-step control
// pairs, the optimal guide laws it induces, and the value-convergence study.
//
// Both players hold grid controls constant between the nodes of a coarse value
// partition. "upper" is the min-max value (the minimizer commits first at each
// step, the maximizer answers knowing the choice); "lower" is the max-min
// value. upper >= lower always.

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fracgame/game.hpp"
#include "fracgame/guide.hpp"
#include "fracgame/strategies.hpp"

namespace fracgame::value {

enum class Order { MinimizerFirst, MaximizerFirst };

struct ValueOptions {
    /// Maximum steps of the value partition.
    std::size_t max_steps = 8;
    /// Cap on steps * log(|U| |V|).
    double log_budget = 17.5778;  // 8 log 9
    /// Search the root moves on separate threads.
    bool parallel = false;
};

struct Memo;

struct ValueQuery {
    const Game* game = nullptr;
    guide::GuideState root;
    /// Value partition over [root.t(), theta]; lattice aligned.
    strat::Partition partition;
    ValueOptions options;
    /// Transposition table keyed by the index tuple from the root; shared by
    /// every search on this query.
    std::shared_ptr<Memo> memo;
};

/// Lattice-aligned partition of [t_begin, theta] into min(max_steps, lattice steps) pieces.
strat::Partition value_partition(double t_begin, double theta, double h, std::size_t max_steps);

ValueQuery make_query(const Game& game, guide::GuideState root, const ValueOptions& options = {});

struct ValueResult {
    double lower = 0.0;
    double upper = 0.0;
    double gap = 0.0;
    std::size_t nodes = 0;
};

/// Alpha-beta minimax in both orders. Throws BudgetExceeded.
ValueResult brute_force_value(const ValueQuery& q);

/// Plain minimax without pruning or memo; the serial reference.
double exhaustive_value(const ValueQuery& q, Order order);

struct ControlDecision {
    std::size_t index = 0;
    double value = 0.0;
};

using Path = std::vector<std::pair<std::size_t, std::size_t>>;

/// Optimal control of `who` at guide state g. The tree is re-rooted at g.t():
/// its first step runs to the next node of q.partition. When `who` moves
/// second in `order`, `committed` is the first mover's index for this step.
ControlDecision optimal_guide_control(const ValueQuery& q, const guide::GuideState& g, strat::Player who, Order order,
                                      std::optional<std::size_t> committed = std::nullopt);

/// The same at the node reached from q.root by `path` of (p, q) index pairs,
/// sharing the query memo.
ControlDecision optimal_guide_control(const ValueQuery& q, const Path& path, strat::Player who, Order order,
                                      std::optional<std::size_t> committed = std::nullopt);

/// Guide law for the procedures: the minimizer plays min-max, the maximizer max-min.
strat::GuideLaw optimal_guide_law(const Game& game, double h, const ValueOptions& options, strat::Player who);

struct ValueMapResult {
    /// Canonical gamma_h: the minimizer-first value.
    double value = 0.0;
    ValueResult detail;
    std::size_t steps = 0;
};

ValueMapResult value_map(const Game& game, const dyn::Position& init, double h, const ValueOptions& options = {});

struct ConvergenceRow {
    double h = 0.0;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double gap = 0.0;
    /// |value - previous value|; NaN on the first row
    double cauchy = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double estimate = 0.0;
    double error_bar = 0.0;
};

ConvergenceTable value_convergence_sweep(const Game& game, const dyn::Position& init, const std::vector<double>& h_list,
                                         const ValueOptions& options = {});

struct BridgeResult {
    SampledFunction y;
    /// x reconstructed as w(t0) + D^(1-alpha) y
    SampledFunction x_reconstructed;
    double reconstruction_error = 0.0;
    /// max |dy/dt - (^C D^alpha x)| over samples in the last 7/8 of the horizon;
    /// the L1 derivative of x carries an O(1) error in the initial layer
    double derivative_residual = 0.0;
};

BridgeResult representation_bridge(const dyn::Position& x, double alpha);

}  // namespace fracgame::value
