#include "fracgame/value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

#include "fracgame/errors.hpp"
#include "fracgame/fractional.hpp"

namespace fracgame::value {

enum class Bound : unsigned char { Exact, Lower, Upper };

struct MemoEntry {
    double value;
    Bound bound;
};

struct Memo {
    std::mutex mu;
    std::unordered_map<std::string, MemoEntry> table;

    std::optional<MemoEntry> find(const std::string& key) {
        std::lock_guard lock(mu);
        auto it = table.find(key);
        if (it == table.end()) return std::nullopt;
        return it->second;
    }
    void store(const std::string& key, MemoEntry e) {
        std::lock_guard lock(mu);
        auto [it, inserted] = table.try_emplace(key, e);
        if (!inserted && (e.bound == Bound::Exact || it->second.bound != Bound::Exact)) it->second = e;
    }
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool after(double a, double b) { return a > b + 1e-12 * std::max(1.0, std::abs(b)); }

void check_budget(const Game& game, std::size_t steps, const ValueOptions& o) {
    const double cost = static_cast<double>(steps) * std::log(static_cast<double>(game.U.size() * game.V.size()));
    if (cost > o.log_budget + 1e-9) {
        std::ostringstream os;
        os << "value tree of " << steps << " steps over " << game.U.size() << "x" << game.V.size()
           << " grids exceeds the budget (" << cost << " > " << o.log_budget << ")";
        throw BudgetExceeded(os.str());
    }
}

/// Nodes of the tree rooted at time t: t itself, then the partition nodes after t.
std::vector<double> rerooted_nodes(const strat::Partition& part, double t, double theta) {
    if (!after(theta, t)) throw ContractError("optimal_guide_control: guide state is already at the terminal time");
    std::vector<double> nodes{t};
    for (double tau : part.times())
        if (after(tau, t)) nodes.push_back(tau);
    return nodes;
}

class Search {
public:
    Search(const Game& game, guide::GuideState g, std::vector<double> nodes, Order order, Memo* memo,
           std::string path)
        : game_(game), g_(std::move(g)), nodes_(std::move(nodes)), order_(order), memo_(memo), path_(std::move(path)) {}

    std::size_t visited() const noexcept { return visited_; }
    const guide::GuideState& state() const noexcept { return g_; }

    bool first_is_min() const noexcept { return order_ == Order::MinimizerFirst; }
    std::size_t first_count() const { return first_is_min() ? game_.U.size() : game_.V.size(); }
    std::size_t second_count() const { return first_is_min() ? game_.V.size() : game_.U.size(); }

    double first(std::size_t j, double a, double b) {
        ++visited_;
        if (j + 1 == nodes_.size()) return guide::guide_quality(g_, game_.sigma, game_.theta);
        std::string key;
        if (memo_) {
            key = memo_key();
            if (auto e = memo_->find(key)) {
                if (e->bound == Bound::Exact) return e->value;
                if (e->bound == Bound::Lower && e->value >= b) return e->value;
                if (e->bound == Bound::Upper && e->value <= a) return e->value;
            }
        }
        const double a0 = a, b0 = b;
        const auto moves = ordered(2 * j, first_count());
        double v;
        if (first_is_min()) {
            v = kInf;
            for (std::size_t i : moves) {
                v = std::min(v, second(j, i, a, std::min(b, v)));
                if (v <= a) {
                    reward(2 * j, i);
                    break;
                }
            }
        } else {
            v = -kInf;
            for (std::size_t i : moves) {
                v = std::max(v, second(j, i, std::max(a, v), b));
                if (v >= b) {
                    reward(2 * j, i);
                    break;
                }
            }
        }
        if (memo_) memo_->store(key, {v, v <= a0 ? Bound::Upper : (v >= b0 ? Bound::Lower : Bound::Exact)});
        return v;
    }

    /// Reply node: the second mover answers the first mover's index i.
    double second(std::size_t j, std::size_t i, double a, double b) {
        ++visited_;
        const auto moves = ordered(2 * j + 1, second_count());
        double v;
        if (first_is_min()) {
            v = -kInf;
            for (std::size_t k : moves) {
                v = std::max(v, child(j, i, k, std::max(a, v), b));
                if (v >= b) {
                    reward(2 * j + 1, k);
                    break;
                }
            }
        } else {
            v = kInf;
            for (std::size_t k : moves) {
                v = std::min(v, child(j, i, k, a, std::min(b, v)));
                if (v <= a) {
                    reward(2 * j + 1, k);
                    break;
                }
            }
        }
        return v;
    }

    /// Value after the pair (first mover i, second mover k) on step j.
    double child(std::size_t j, std::size_t i, std::size_t k, double a, double b) {
        const std::size_t p = first_is_min() ? i : k;
        const std::size_t q = first_is_min() ? k : i;
        const std::size_t samples = g_.y.size();
        guide::step_guide_inplace(g_, game_.dyn, game_.U[p], game_.V[q], nodes_[j + 1]);
        path_.push_back(static_cast<char>(p));
        path_.push_back(static_cast<char>(q));
        double v;
        try {
            v = first(j + 1, a, b);
        } catch (...) {
            path_.resize(path_.size() - 2);
            guide::truncate_guide(g_, samples);
            throw;
        }
        path_.resize(path_.size() - 2);
        guide::truncate_guide(g_, samples);
        return v;
    }

private:
    // History heuristic: moves that caused cutoffs at a ply are tried first there.
    std::vector<std::size_t> ordered(std::size_t ply, std::size_t count) {
        if (history_.size() <= ply) history_.resize(ply + 1);
        auto& h = history_[ply];
        if (h.size() < count) h.resize(count, 0);
        std::vector<std::size_t> idx(count);
        for (std::size_t i = 0; i < count; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&h](std::size_t x, std::size_t y) { return h[x] > h[y]; });
        return idx;
    }
    void reward(std::size_t ply, std::size_t move) {
        const std::size_t remaining = nodes_.size() - 1 - ply / 2;
        history_[ply][move] += std::uint64_t{1} << std::min<std::size_t>(2 * remaining, 40);
    }

    std::string memo_key() const { return std::string(1, order_ == Order::MinimizerFirst ? 'm' : 'M') + path_; }

    const Game& game_;
    guide::GuideState g_;
    std::vector<double> nodes_;
    Order order_;
    Memo* memo_;
    std::string path_;
    std::size_t visited_ = 0;
    std::vector<std::vector<std::uint64_t>> history_;
};

double plain_minimax(const Game& game, guide::GuideState& g, const std::vector<double>& nodes, std::size_t j,
                     Order order) {
    if (j + 1 == nodes.size()) return guide::guide_quality(g, game.sigma, game.theta);
    const bool min_first = order == Order::MinimizerFirst;
    const std::size_t nf = min_first ? game.U.size() : game.V.size();
    const std::size_t ns = min_first ? game.V.size() : game.U.size();
    double outer = min_first ? kInf : -kInf;
    for (std::size_t i = 0; i < nf; ++i) {
        double inner = min_first ? -kInf : kInf;
        for (std::size_t k = 0; k < ns; ++k) {
            const std::size_t p = min_first ? i : k;
            const std::size_t q = min_first ? k : i;
            guide::GuideState next = guide::step_guide(g, game.dyn, game.U[p], game.V[q], nodes[j + 1]);
            const double v = plain_minimax(game, next, nodes, j + 1, order);
            inner = min_first ? std::max(inner, v) : std::min(inner, v);
        }
        outer = min_first ? std::min(outer, inner) : std::max(outer, inner);
    }
    return outer;
}

std::string path_key(const Path& path) {
    std::string s;
    for (auto [p, q] : path) {
        s.push_back(static_cast<char>(p));
        s.push_back(static_cast<char>(q));
    }
    return s;
}

double root_value(const ValueQuery& q, Order order, std::size_t& visited) {
    const auto& nodes = q.partition.times();
    if (!q.options.parallel) {
        Search s(*q.game, q.root, nodes, order, q.memo.get(), {});
        const double v = s.first(0, -kInf, kInf);
        visited += s.visited();
        return v;
    }
    const bool min_first = order == Order::MinimizerFirst;
    const std::size_t nf = min_first ? q.game->U.size() : q.game->V.size();
    std::vector<double> vals(nf);
    std::vector<std::size_t> counts(nf, 0);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < nf; ++i) {
        try {
            Search s(*q.game, q.root, nodes, order, q.memo.get(), {});
            vals[i] = s.second(0, i, -kInf, kInf);
            counts[i] = s.visited();
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    for (auto c : counts) visited += c;
    ++visited;
    return min_first ? *std::min_element(vals.begin(), vals.end()) : *std::max_element(vals.begin(), vals.end());
}

void check_query(const ValueQuery& q) {
    if (q.game == nullptr) throw ContractError("ValueQuery: game not set");
    const auto& P = q.partition;
    if (P.steps() == 0) throw ContractError("ValueQuery: empty partition");
    if (std::abs(P[0] - q.root.t()) > 1e-12 || std::abs(P[P.steps()] - q.game->theta) > 1e-12)
        throw ContractError("ValueQuery: partition must span [root time, theta]");
    if (q.game->U.size() > 255 || q.game->V.size() > 255) throw ContractError("ValueQuery: grids limited to 255 points");
    check_budget(*q.game, P.steps(), q.options);
}

ControlDecision decide(const Game& game, Search& s, strat::Player who, Order order,
                       std::optional<std::size_t> committed) {
    const bool min_first = order == Order::MinimizerFirst;
    const bool who_first = (who == strat::Player::Minimizer) == min_first;
    const bool minimizing = who == strat::Player::Minimizer;
    ControlDecision d;
    d.value = minimizing ? kInf : -kInf;
    if (who_first) {
        for (std::size_t i = 0; i < s.first_count(); ++i) {
            const double v = minimizing ? s.second(0, i, -kInf, d.value) : s.second(0, i, d.value, kInf);
            if (minimizing ? v < d.value : v > d.value) {
                d.value = v;
                d.index = i;
            }
        }
    } else {
        if (!committed) throw ContractError("optimal_guide_control: the second mover needs the committed first move");
        const std::size_t nf = min_first ? game.U.size() : game.V.size();
        if (*committed >= nf) throw ContractError("optimal_guide_control: committed index outside its grid");
        for (std::size_t k = 0; k < s.second_count(); ++k) {
            const double v = minimizing ? s.child(0, *committed, k, -kInf, d.value)
                                        : s.child(0, *committed, k, d.value, kInf);
            if (minimizing ? v < d.value : v > d.value) {
                d.value = v;
                d.index = k;
            }
        }
    }
    return d;
}

}  // namespace

strat::Partition value_partition(double t_begin, double theta, double h, std::size_t max_steps) {
    const long long M = exact_ratio(theta - t_begin, h);
    if (M <= 0) throw ContractError("value_partition: [t_begin, theta] must hold a whole number of lattice steps");
    if (max_steps == 0) throw ContractError("value_partition: max_steps must be positive");
    const auto K = std::min<long long>(static_cast<long long>(max_steps), M);
    std::vector<double> times(static_cast<std::size_t>(K) + 1);
    for (long long i = 0; i <= K; ++i) times[static_cast<std::size_t>(i)] = t_begin + static_cast<double>(i * M / K) * h;
    times.back() = theta;
    return strat::Partition(std::move(times));
}

ValueQuery make_query(const Game& game, guide::GuideState root, const ValueOptions& options) {
    ValueQuery q;
    q.game = &game;
    q.partition = value_partition(root.t(), game.theta, root.config.h, options.max_steps);
    q.root = std::move(root);
    q.options = options;
    q.memo = std::make_shared<Memo>();
    return q;
}

ValueResult brute_force_value(const ValueQuery& q) {
    check_query(q);
    ValueResult r;
    r.upper = root_value(q, Order::MinimizerFirst, r.nodes);
    r.lower = root_value(q, Order::MaximizerFirst, r.nodes);
    r.gap = r.upper - r.lower;
    return r;
}

double exhaustive_value(const ValueQuery& q, Order order) {
    check_query(q);
    guide::GuideState g = q.root;
    return plain_minimax(*q.game, g, q.partition.times(), 0, order);
}

ControlDecision optimal_guide_control(const ValueQuery& q, const guide::GuideState& g, strat::Player who, Order order,
                                      std::optional<std::size_t> committed) {
    if (q.game == nullptr) throw ContractError("ValueQuery: game not set");
    auto nodes = rerooted_nodes(q.partition, g.t(), q.game->theta);
    check_budget(*q.game, nodes.size() - 1, q.options);
    Search s(*q.game, g, std::move(nodes), order, nullptr, {});
    return decide(*q.game, s, who, order, committed);
}

ControlDecision optimal_guide_control(const ValueQuery& q, const Path& path, strat::Player who, Order order,
                                      std::optional<std::size_t> committed) {
    check_query(q);
    const auto& nodes = q.partition.times();
    if (path.size() >= nodes.size() - 1) throw ContractError("optimal_guide_control: path reaches the terminal node");
    guide::GuideState g = q.root;
    for (std::size_t j = 0; j < path.size(); ++j) {
        const auto [p, qi] = path[j];
        if (p >= q.game->U.size() || qi >= q.game->V.size()) throw ContractError("optimal_guide_control: bad path");
        guide::step_guide_inplace(g, q.game->dyn, q.game->U[p], q.game->V[qi], nodes[j + 1]);
    }
    std::vector<double> rest(nodes.begin() + static_cast<std::ptrdiff_t>(path.size()), nodes.end());
    Search s(*q.game, std::move(g), std::move(rest), order, q.memo.get(), path_key(path));
    return decide(*q.game, s, who, order, committed);
}

strat::GuideLaw optimal_guide_law(const Game& game, double h, const ValueOptions& options, strat::Player who) {
    guide::GuideConfig gc;
    gc.w0 = game.init.initial();
    gc.h = h;
    gc.alpha = game.alpha;
    ValueQuery q = make_query(game, guide::initial_guide_state(game.t0, gc), options);
    q.partition = value_partition(game.t_star(), game.theta, h, options.max_steps);
    const Order order = who == strat::Player::Minimizer ? Order::MinimizerFirst : Order::MaximizerFirst;
    return [q = std::move(q), who, order](const guide::GuideState& g, std::size_t) {
        return optimal_guide_control(q, g, who, order).index;
    };
}

ValueMapResult value_map(const Game& game, const dyn::Position& init, double h, const ValueOptions& options) {
    guide::GuideConfig gc;
    gc.h = h;
    gc.alpha = game.alpha;
    gc.blowup_radius = 10.0 * game.bounds().R1;
    ValueQuery q = make_query(game, guide::initial_guide_segment(init, gc), options);
    ValueMapResult r;
    r.detail = brute_force_value(q);
    r.value = r.detail.upper;
    r.steps = q.partition.steps();
    return r;
}

ConvergenceTable value_convergence_sweep(const Game& game, const dyn::Position& init, const std::vector<double>& h_list,
                                         const ValueOptions& options) {
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1])) throw ContractError("value_convergence_sweep: h_list must decrease");
    ConvergenceTable t;
    for (double h : h_list) {
        const auto v = value_map(game, init, h, options);
        ConvergenceRow row{h, v.value, v.detail.lower, v.detail.upper, v.detail.gap,
                           std::numeric_limits<double>::quiet_NaN()};
        if (!t.rows.empty()) row.cauchy = std::abs(row.value - t.rows.back().value);
        t.rows.push_back(row);
    }
    if (!t.rows.empty()) {
        t.estimate = t.rows.back().value;
        t.error_bar = t.rows.size() > 1 ? t.rows.back().cauchy : std::numeric_limits<double>::infinity();
    }
    return t;
}

BridgeResult representation_bridge(const dyn::Position& x, double alpha) {
    const frac::FractionalOrder order(alpha);
    BridgeResult r;
    const std::size_t n = x.w.size();
    if (n < 2) throw ContractError("representation_bridge: need at least two samples");
    const Vec w0 = x.initial();
    SampledFunction shifted = x.w;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t d = 0; d < w0.size(); ++d) shifted[k][d] -= w0[d];
    r.y = frac::rl_integral_corrected(shifted, 1.0 - alpha, alpha);
    r.x_reconstructed = frac::caputo_derivative(r.y, frac::FractionalOrder(1.0 - alpha));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t d = 0; d < w0.size(); ++d) {
            r.x_reconstructed[k][d] += w0[d];
            r.reconstruction_error = std::max(r.reconstruction_error, std::abs(r.x_reconstructed[k][d] - x.w[k][d]));
        }
    const SampledFunction cx = frac::caputo_derivative(x.w, order);
    for (std::size_t k = std::max<std::size_t>(1, (n - 1) / 8); k + 1 < n; ++k)
        for (std::size_t d = 0; d < w0.size(); ++d) {
            const double dy = (r.y[k + 1][d] - r.y[k - 1][d]) / (2.0 * x.step());
            r.derivative_residual = std::max(r.derivative_residual, std::abs(dy - cx[k][d]));
        }
    return r;
}

}  // namespace fracgame::value
