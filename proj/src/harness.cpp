#include "fracgame/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "builtin_scenarios.hpp"
#include "fracgame/errors.hpp"

namespace fracgame::harness {

namespace {

// --- parsing helpers -------------------------------------------------------

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key, "missing");
    return j.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    return v;
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
    return j.contains(key) ? number(j.at(key), path + key) : fallback;
}

Vec vector_of(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a non-empty array of numbers");
    Vec v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

std::vector<Vec> grid_of(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a non-empty array of points");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_of(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::string text(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "must be a string");
    return j.get<std::string>();
}

RunSettings parse_settings(const json& j, RunSettings s) {
    const std::string p = "defaults.";
    s.h = number_or(j, "h", s.h, p);
    s.diam = number_or(j, "diam", s.diam, p);
    s.epsilon = number_or(j, "epsilon", s.epsilon, p);
    s.zeta = number_or(j, "zeta", s.zeta, p);
    s.xi = number_or(j, "xi", s.xi, p);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError(p + "seed", "must be a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("adversaries")) {
        if (!j["adversaries"].is_number_unsigned()) throw ConfigError(p + "adversaries", "must be a non-negative integer");
        s.adversaries = j["adversaries"].get<std::size_t>();
    }
    if (j.contains("value_steps")) {
        if (!j["value_steps"].is_number_unsigned() || j["value_steps"].get<std::size_t>() == 0)
            throw ConfigError(p + "value_steps", "must be a positive integer");
        s.value_steps = j["value_steps"].get<std::size_t>();
    }
    if (j.contains("sweep_k")) {
        s.sweep_k.clear();
        for (const auto& k : j["sweep_k"]) {
            if (!k.is_number_integer() || k.get<int>() < 0 || k.get<int>() > 20)
                throw ConfigError(p + "sweep_k", "entries must be integers in [0, 20]");
            s.sweep_k.push_back(k.get<int>());
        }
    }
    if (j.contains("h_list")) s.h_list = vector_of(j["h_list"], p + "h_list");
    return s;
}

void validate(const ScenarioSpec& s) {
    if (s.name.empty()) throw ConfigError("name", "must not be empty");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
    if (!(s.t0 < s.theta)) throw ConfigError("theta", "must exceed t0");
    if (s.n == 0) throw ConfigError("n", "must be positive");
    if (!(s.R0 > 0.0)) throw ConfigError("R0", "must be positive");
    if (s.w0.size() != s.n) throw ConfigError("initial.w0", "must have n components");
    if (norm(s.w0) > s.R0) throw ConfigError("initial.w0", "norm exceeds R0");
    if (!(s.grid_step > 0.0)) throw ConfigError("grid_step", "must be positive");
    if (exact_ratio(s.theta - s.t0, s.grid_step) <= 0) throw ConfigError("grid_step", "must divide theta - t0");
    if (s.t_star < s.t0 || s.t_star >= s.theta) throw ConfigError("initial.t_star", "must lie in [t0, theta)");
    if (exact_ratio(s.t_star - s.t0, s.grid_step) < 0) throw ConfigError("initial.t_star", "must be a grid point");
    if (s.segment_kind != "constant" && s.segment_kind != "power")
        throw ConfigError("initial.kind", "must be \"constant\" or \"power\"");
    if (s.segment_kind == "power" && s.segment_coeffs.size() != s.n)
        throw ConfigError("initial.a", "must have n components");
    for (const auto& [grid, name] : {std::pair{&s.U, "controls.U"}, std::pair{&s.V, "controls.V"}}) {
        for (const auto& p : *grid)
            if (p.size() != grid->front().size()) throw ConfigError(name, "points differ in dimension");
        for (std::size_t i = 0; i < grid->size(); ++i)
            for (std::size_t k = 0; k < i; ++k)
                if ((*grid)[i] == (*grid)[k]) throw ConfigError(name, "points must be distinct");
    }
    static const std::vector<std::string> dyn_ids{"affine", "pursuit", "bilinear"};
    if (std::find(dyn_ids.begin(), dyn_ids.end(), s.dynamics_id) == dyn_ids.end())
        throw ConfigError("dynamics.id", "unknown dynamics \"" + s.dynamics_id + "\"");
    static const std::vector<std::string> sigma_ids{"terminal_linear", "terminal_norm", "running_max_norm", "constant"};
    if (std::find(sigma_ids.begin(), sigma_ids.end(), s.sigma_id) == sigma_ids.end())
        throw ConfigError("sigma.id", "unknown quality index \"" + s.sigma_id + "\"");
    const auto& d = s.defaults;
    if (!(d.h > 0.0)) throw ConfigError("defaults.h", "must be positive");
    if (!(d.diam > 0.0)) throw ConfigError("defaults.diam", "must be positive");
    if (!(d.epsilon > 0.0)) throw ConfigError("defaults.epsilon", "must be positive");
    if (!(d.zeta > 0.0)) throw ConfigError("defaults.zeta", "must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario loading

std::vector<std::string> builtin_names() { return {"linear_scalar", "pursuit_2d"}; }

ScenarioSpec parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("", "scenario must be a JSON object");
    ScenarioSpec s;
    s.name = text(require(j, "name", ""), "name");
    s.alpha = number(require(j, "alpha", ""), "alpha");
    s.t0 = number(require(j, "t0", ""), "t0");
    s.theta = number(require(j, "theta", ""), "theta");
    const auto& n = require(j, "n", "");
    if (!n.is_number_unsigned()) throw ConfigError("n", "must be a positive integer");
    s.n = n.get<std::size_t>();

    const auto& d = require(j, "dynamics", "");
    s.dynamics_id = text(require(d, "id", "dynamics."), "dynamics.id");
    s.dynamics_params = d;
    s.dynamics_params.erase("id");

    const auto& c = require(j, "controls", "");
    s.U = grid_of(require(c, "U", "controls."), "controls.U");
    s.V = grid_of(require(c, "V", "controls."), "controls.V");

    const auto& sg = require(j, "sigma", "");
    s.sigma_id = text(require(sg, "id", "sigma."), "sigma.id");
    s.sigma_params = sg;
    s.sigma_params.erase("id");

    s.R0 = number(require(j, "R0", ""), "R0");
    const auto& init = require(j, "initial", "");
    s.w0 = vector_of(require(init, "w0", "initial."), "initial.w0");
    if (init.contains("kind")) s.segment_kind = text(init["kind"], "initial.kind");
    s.t_star = number_or(init, "t_star", s.t0, "initial.");
    if (init.contains("a")) s.segment_coeffs = vector_of(init["a"], "initial.a");
    s.grid_step = number(require(j, "grid_step", ""), "grid_step");
    if (j.contains("reference_value")) s.reference_value = number(j["reference_value"], "reference_value");
    if (j.contains("defaults")) {
        if (!j["defaults"].is_object()) throw ConfigError("defaults", "must be an object");
        s.defaults = parse_settings(j["defaults"], s.defaults);
    }
    validate(s);
    return s;
}

ScenarioSpec load_scenario(const std::string& name_or_path) {
    std::string source;
    if (name_or_path == "linear_scalar") {
        source = builtin::linear_scalar;
    } else if (name_or_path == "pursuit_2d") {
        source = builtin::pursuit_2d;
    } else {
        std::ifstream in(name_or_path);
        if (!in) throw ConfigError("scenario", "no builtin named \"" + name_or_path + "\" and the file cannot be opened");
        std::stringstream ss;
        ss << in.rdbuf();
        source = ss.str();
    }
    json j;
    try {
        j = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario", std::string("parse error: ") + e.what());
    }
    return parse_scenario(j);
}

json settings_to_json(const RunSettings& s) {
    json j;
    j["h"] = s.h;
    j["diam"] = s.diam;
    j["epsilon"] = s.epsilon;
    j["zeta"] = s.zeta;
    j["seed"] = s.seed;
    j["adversaries"] = s.adversaries;
    j["value_steps"] = s.value_steps;
    j["xi"] = s.xi;
    j["sweep_k"] = s.sweep_k;
    j["h_list"] = s.h_list;
    return j;
}

json scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    j["alpha"] = s.alpha;
    j["t0"] = s.t0;
    j["theta"] = s.theta;
    j["n"] = s.n;
    json d = {{"id", s.dynamics_id}};
    for (auto& [k, v] : s.dynamics_params.items()) d[k] = v;
    j["dynamics"] = d;
    j["controls"] = {{"U", s.U}, {"V", s.V}};
    json sg = {{"id", s.sigma_id}};
    for (auto& [k, v] : s.sigma_params.items()) sg[k] = v;
    j["sigma"] = sg;
    j["R0"] = s.R0;
    json init = {{"w0", s.w0}, {"kind", s.segment_kind}, {"t_star", s.t_star}};
    if (!s.segment_coeffs.empty()) init["a"] = s.segment_coeffs;
    j["initial"] = init;
    j["grid_step"] = s.grid_step;
    if (s.reference_value) j["reference_value"] = *s.reference_value;
    j["defaults"] = settings_to_json(s.defaults);
    return j;
}

Game build_game(const ScenarioSpec& s) {
    dyn::ControlSet U(s.U), V(s.V);
    auto param = [&s](const char* key, double fallback) {
        return number_or(s.dynamics_params, key, fallback, "dynamics.");
    };
    std::optional<dyn::Dynamics> d;
    if (s.dynamics_id == "affine") {
        Vec b = s.dynamics_params.contains("b") ? vector_of(s.dynamics_params["b"], "dynamics.b") : Vec(s.n, 0.0);
        if (b.size() != s.n) throw ConfigError("dynamics.b", "must have n components");
        if (U.dim() != s.n || V.dim() != s.n) throw ConfigError("controls", "affine dynamics needs n-dimensional controls");
        d = dyn::affine_dynamics(param("a", 0.0), b, U, V);
    } else if (s.dynamics_id == "pursuit") {
        if (U.dim() != s.n || V.dim() != s.n) throw ConfigError("controls", "pursuit dynamics needs n-dimensional controls");
        d = dyn::pursuit_dynamics(s.n, param("drift", 0.0), U, V);
    } else {
        if (s.n != 1 || U.dim() != 1 || V.dim() != 1) throw ConfigError("dynamics.id", "bilinear dynamics is scalar");
        d = dyn::bilinear_dynamics(U, V);
    }

    dyn::QualityIndex sigma = dyn::QualityIndex::constant(0.0);
    if (s.sigma_id == "terminal_linear") {
        const Vec w = s.sigma_params.contains("weights") ? vector_of(s.sigma_params["weights"], "sigma.weights")
                                                         : Vec(s.n, 1.0);
        if (w.size() != s.n) throw ConfigError("sigma.weights", "must have n components");
        sigma = dyn::QualityIndex::terminal_linear(w, number_or(s.sigma_params, "offset", 0.0, "sigma."));
    } else if (s.sigma_id == "terminal_norm") {
        sigma = dyn::QualityIndex::terminal_norm();
    } else if (s.sigma_id == "running_max_norm") {
        sigma = dyn::QualityIndex::running_max_norm();
    } else {
        sigma = dyn::QualityIndex::constant(number_or(s.sigma_params, "value", 0.0, "sigma."));
    }

    dyn::Position init = s.segment_kind == "power"
                             ? dyn::Position::power(s.t0, s.t_star, s.grid_step, s.w0, s.segment_coeffs, s.alpha)
                             : dyn::Position::constant(s.t0, s.t_star, s.grid_step, s.w0);
    Game g{s.name, std::move(*d), U, V, sigma, s.alpha, s.t0, s.theta, s.R0, std::move(init), s.grid_step};
    const auto rep = dyn::check_admissible(g.init, g.dyn.growth(), g.R0, g.alpha);
    if (!rep.admissible) throw ConfigError("initial", "initial position is not admissible: " + rep.message);
    return g;
}

ConditionReport probe_conditions(const Game& game) {
    const std::size_t n = game.dyn.dim();
    const auto bounds = game.bounds();
    std::vector<Vec> dirs;
    for (std::size_t i = 0; i < n; ++i)
        for (double sgn : {1.0, -1.0}) {
            Vec e(n, 0.0);
            e[i] = sgn;
            dirs.push_back(e);
        }
    dirs.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 4; ++k) {
        Vec e(n);
        for (double& c : e) c = normal(rng);
        const double len = norm(e);
        for (double& c : e) c /= len;
        dirs.push_back(e);
    }
    std::vector<dyn::ConditionProbe> probes;
    for (double t : {game.t0, 0.5 * (game.t0 + game.theta), game.theta})
        for (double r : {0.0, game.R0, bounds.R1})
            for (const auto& dx : dirs) {
                Vec x(n);
                for (std::size_t i = 0; i < n; ++i) x[i] = r * dx[i];
                for (const auto& s : dirs) probes.push_back({t, x, s});
                if (r == 0.0) break;
            }
    ConditionReport rep;
    rep.probes = probes.size();
    rep.isaacs = dyn::check_isaacs(game.dyn, game.U, game.V, probes);
    rep.bounds = dyn::check_bounds(game.dyn, game.U, game.V, probes, bounds.R1 + 1.0);
    if (rep.isaacs.max_gap > 1e-9) {
        std::ostringstream os;
        os << "saddle-point gap " << rep.isaacs.max_gap << " at probe " << rep.isaacs.worst_probe;
        rep.warnings.push_back(os.str());
    }
    if (rep.bounds.growth_ratio > 1.0 + 1e-9) rep.warnings.push_back("growth bound violated on probes");
    if (rep.bounds.lipschitz_ratio > 1.0 + 1e-9) rep.warnings.push_back("Lipschitz bound violated on probes");
    rep.ok = rep.warnings.empty();
    return rep;
}

std::vector<std::size_t> random_indices(std::size_t steps, std::size_t grid_size, std::uint64_t seed,
                                        std::initializer_list<std::uint64_t> stream) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (auto s : stream) {
        words.push_back(static_cast<std::uint32_t>(s));
        words.push_back(static_cast<std::uint32_t>(s >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, grid_size - 1);
    std::vector<std::size_t> out(steps);
    for (auto& i : out) i = pick(rng);
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

template <class F>
void parallel_for(std::size_t count, F&& body) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

strat::ProcedureConfig procedure_config(const Game& game, double h, double diam, double epsilon, double zeta) {
    strat::ProcedureConfig cfg;
    cfg.h = h;
    cfg.epsilon = epsilon;
    cfg.zeta = zeta;
    try {
        cfg.partition = strat::Partition::uniform(game.t_star(), game.theta, diam);
    } catch (const ContractError& e) {
        throw ConfigError("diam", e.what());
    }
    return cfg;
}

value::ValueOptions value_options(const RunSettings& s) {
    value::ValueOptions o;
    o.max_steps = s.value_steps;
    return o;
}

}  // namespace

DeviationReport run_lemma2_experiment(const Game& game, const RunSettings& s) {
    DeviationReport r;
    const std::size_t nk = s.sweep_k.size();
    const std::size_t per = 2 * s.adversaries;
    r.samples.resize(nk * per);
    for (std::size_t ik = 0; ik < nk; ++ik) {
        const int k = s.sweep_k[ik];
        const double h = std::ldexp(1.0, -k);
        const auto cfg = procedure_config(game, h, h, s.epsilon, s.zeta);
        const std::size_t steps = cfg.partition.steps();
        parallel_for(per, [&](std::size_t idx) {
            const std::size_t side = idx / s.adversaries;
            const std::size_t a = idx % s.adversaries;
            const auto ku = static_cast<std::uint64_t>(k);
            strat::GameRunResult run;
            if (side == 0) {
                const auto v = strat::realization(cfg.partition, game.V, random_indices(steps, game.V.size(), s.seed, {ku, 0, a, 0}));
                const auto p = random_indices(steps, game.U.size(), s.seed, {ku, 0, a, 1});
                run = strat::control_with_guide_first(game, cfg, v, strat::fixed_guide_law(p));
            } else {
                const auto u = strat::realization(cfg.partition, game.U, random_indices(steps, game.U.size(), s.seed, {ku, 1, a, 0}));
                const auto q = random_indices(steps, game.V.size(), s.seed, {ku, 1, a, 1});
                run = strat::control_with_guide_second(game, cfg, u, strat::fixed_guide_law(q));
            }
            DeviationSample& d = r.samples[ik * per + idx];
            d.k = k;
            d.h = h;
            d.procedure = side == 0 ? "first" : "second";
            d.adversary = a;
            d.max_deviation = run.max_deviation;
            d.gamma = run.gamma;
            d.gamma_h = run.gamma_h;
            d.bounds_ok = run.apriori.holds;
        });
    }
    for (const char* proc : {"first", "second"}) {
        const DeviationSample* prev = nullptr;
        for (std::size_t ik = 0; ik < nk; ++ik) {
            DeviationSample w;
            w.k = s.sweep_k[ik];
            w.h = std::ldexp(1.0, -w.k);
            w.procedure = proc;
            for (const auto& d : r.samples)
                if (d.k == w.k && d.procedure == proc) {
                    if (d.max_deviation >= w.max_deviation) {
                        w.max_deviation = d.max_deviation;
                        w.adversary = d.adversary;
                        w.gamma = d.gamma;
                        w.gamma_h = d.gamma_h;
                    }
                    w.bounds_ok = w.bounds_ok && d.bounds_ok;
                }
            r.worst.push_back(w);
            if (prev && w.max_deviation > 1.1 * prev->max_deviation) r.monotone = false;
            prev = &r.worst.back();
        }
        if (nk > 0 && r.worst.back().max_deviation > s.xi) r.final_within_xi = false;
    }
    for (const auto& d : r.samples) r.bounds_ok = r.bounds_ok && d.bounds_ok;
    r.pass = r.monotone && r.final_within_xi && r.bounds_ok;
    return r;
}

Theorem1Report run_theorem1_experiment(const Game& game, const RunSettings& s) {
    Theorem1Report r;
    const auto opts = value_options(s);
    r.value = value::value_map(game, game.init, s.h, opts);
    const double G = r.value.value;
    const auto cfg = procedure_config(game, s.h, s.diam, s.epsilon, s.zeta);
    const std::size_t steps = cfg.partition.steps();
    const auto p_law = value::optimal_guide_law(game, s.h, opts, strat::Player::Minimizer);
    const auto q_law = value::optimal_guide_law(game, s.h, opts, strat::Player::Maximizer);
    r.samples.resize(2 * s.adversaries);
    parallel_for(2 * s.adversaries, [&](std::size_t idx) {
        const std::size_t side = idx / s.adversaries;
        const std::size_t a = idx % s.adversaries;
        strat::GameRunResult run;
        ProcedureSample& out = r.samples[idx];
        if (side == 0) {
            const auto v = strat::realization(cfg.partition, game.V, random_indices(steps, game.V.size(), s.seed, {1, a}));
            run = strat::control_with_guide_first(game, cfg, v, p_law);
            out.inequality = run.gamma <= G + s.zeta;
        } else {
            const auto u = strat::realization(cfg.partition, game.U, random_indices(steps, game.U.size(), s.seed, {2, a}));
            run = strat::control_with_guide_second(game, cfg, u, q_law);
            out.inequality = run.gamma >= G - s.zeta;
        }
        out.procedure = side == 0 ? "first" : "second";
        out.adversary = a;
        out.gamma = run.gamma;
        out.gamma_h = run.gamma_h;
        out.max_deviation = run.max_deviation;
        out.bounds_ok = run.apriori.holds;
    });
    r.max_gamma_first = -std::numeric_limits<double>::infinity();
    r.min_gamma_second = std::numeric_limits<double>::infinity();
    for (const auto& x : r.samples) {
        if (x.procedure == "first") {
            r.first_ok = r.first_ok && x.inequality;
            r.max_gamma_first = std::max(r.max_gamma_first, x.gamma);
        } else {
            r.second_ok = r.second_ok && x.inequality;
            r.min_gamma_second = std::min(r.min_gamma_second, x.gamma);
        }
        r.bounds_ok = r.bounds_ok && x.bounds_ok;
    }
    if (r.samples.empty()) r.max_gamma_first = r.min_gamma_second = G;
    r.bracket_width = r.max_gamma_first - r.min_gamma_second;
    r.pass = r.first_ok && r.second_ok && r.bounds_ok;
    return r;
}

SingleRunReport run_single(const Game& game, const RunSettings& s) {
    SingleRunReport r;
    const auto opts = value_options(s);
    r.value = value::value_map(game, game.init, s.h, opts);
    const auto cfg = procedure_config(game, s.h, s.diam, s.epsilon, s.zeta);
    const std::size_t steps = cfg.partition.steps();
    const auto v = strat::realization(cfg.partition, game.V, random_indices(steps, game.V.size(), s.seed, {3, 0}));
    const auto u = strat::realization(cfg.partition, game.U, random_indices(steps, game.U.size(), s.seed, {4, 0}));
    r.first = strat::control_with_guide_first(game, cfg, v,
                                              value::optimal_guide_law(game, s.h, opts, strat::Player::Minimizer));
    r.second = strat::control_with_guide_second(game, cfg, u,
                                                value::optimal_guide_law(game, s.h, opts, strat::Player::Maximizer));
    r.pass = r.first.gamma <= r.value.value + s.zeta && r.second.gamma >= r.value.value - s.zeta &&
             r.first.apriori.holds && r.second.apriori.holds;
    return r;
}

ValueSweepReport run_value_sweep(const Game& game, const RunSettings& s, std::optional<double> reference,
                                 double tolerance) {
    ValueSweepReport r;
    try {
        r.table = value::value_convergence_sweep(game, game.init, s.h_list, value_options(s));
    } catch (const ContractError& e) {
        throw ConfigError("h_list", e.what());
    }
    for (std::size_t i = 2; i < r.table.rows.size(); ++i)
        if (!(r.table.rows[i].cauchy * 1.3 <= r.table.rows[i - 1].cauchy)) r.shrinking = false;
    r.reference = reference;
    if (reference) r.near_reference = !r.table.rows.empty() && std::abs(r.table.estimate - *reference) <= tolerance;
    r.pass = r.shrinking && r.near_reference;
    return r;
}

// ---------------------------------------------------------------------------
// Emission

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

void add_columns(std::vector<std::string>& header, const char* prefix, std::size_t n) {
    for (std::size_t i = 1; i <= n; ++i) header.push_back(prefix + std::to_string(i));
}

void add_values(std::vector<std::string>& row, std::span<const double> v) {
    for (double x : v) row.push_back(format_number(x));
}

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

Table trajectory_table(const strat::GameRunResult& r) {
    Table t;
    t.header = {"t"};
    const std::size_t n = r.x.w.dim();
    add_columns(t.header, "x", n);
    add_columns(t.header, "u", r.u.values().front().size());
    add_columns(t.header, "v", r.v.values().front().size());
    const std::size_t first = r.x.w.index_of(r.u.t_begin());
    for (std::size_t k = first; k < r.x.w.size(); ++k) {
        const double tk = r.x.w.time(k);
        std::vector<std::string> row{format_number(tk)};
        add_values(row, r.x.w[k]);
        add_values(row, r.u.at(tk));
        add_values(row, r.v.at(tk));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table guide_table(const strat::GameRunResult& r) {
    Table t;
    t.header = {"t"};
    const auto& g = r.guide;
    const std::size_t n = g.y.dim();
    add_columns(t.header, "y", n);
    add_columns(t.header, "xr", n);
    add_columns(t.header, "p", r.p.values().front().size());
    add_columns(t.header, "q", r.q.values().front().size());
    const std::size_t K = g.config.substeps();
    const std::size_t first = g.y.index_of(r.p.t_begin());
    for (std::size_t k = first; k < g.y.size(); ++k) {
        const double tk = g.y.time(k);
        std::vector<std::string> row{format_number(tk)};
        add_values(row, g.y[k]);
        add_values(row, g.recon[k / K]);
        add_values(row, r.p.at(tk));
        add_values(row, r.q.at(tk));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table deviation_table(const DeviationReport& r) {
    Table t;
    t.header = {"k", "h", "delta", "procedure", "adversary", "max_deviation", "gamma", "gamma_h", "bounds_ok"};
    for (const auto& d : r.samples)
        t.rows.push_back({std::to_string(d.k), format_number(d.h), format_number(d.h), d.procedure,
                          std::to_string(d.adversary), format_number(d.max_deviation), format_number(d.gamma),
                          format_number(d.gamma_h), flag(d.bounds_ok)});
    return t;
}

Table theorem1_table(const Theorem1Report& r) {
    Table t;
    t.header = {"procedure", "adversary", "gamma", "gamma_h", "value", "max_deviation", "inequality", "bounds_ok"};
    for (const auto& s : r.samples)
        t.rows.push_back({s.procedure, std::to_string(s.adversary), format_number(s.gamma), format_number(s.gamma_h),
                          format_number(r.value.value), format_number(s.max_deviation), flag(s.inequality),
                          flag(s.bounds_ok)});
    return t;
}

Table value_table(const ValueSweepReport& r) {
    Table t;
    t.header = {"h", "value", "lower", "upper", "gap", "cauchy"};
    for (const auto& row : r.table.rows)
        t.rows.push_back({format_number(row.h), format_number(row.value), format_number(row.lower),
                          format_number(row.upper), format_number(row.gap), format_number(row.cauchy)});
    return t;
}

json summary(const std::string& scenario, const json& config, const json& results, bool pass) {
    json j;
    j["scenario"] = scenario;
    j["config"] = config;
    j["results"] = results;
    j["pass"] = pass;
    return j;
}

json deviation_results(const DeviationReport& r) {
    json worst = json::array();
    for (const auto& w : r.worst)
        worst.push_back({{"procedure", w.procedure}, {"k", w.k}, {"h", w.h}, {"max_deviation", w.max_deviation},
                         {"adversary", w.adversary}, {"bounds_ok", w.bounds_ok}});
    return {{"worst", worst}, {"monotone", r.monotone}, {"final_within_xi", r.final_within_xi},
            {"bounds_ok", r.bounds_ok}, {"samples", r.samples.size()}};
}

json theorem1_results(const Theorem1Report& r) {
    return {{"value", r.value.value},
            {"lower", r.value.detail.lower},
            {"upper", r.value.detail.upper},
            {"gap", r.value.detail.gap},
            {"value_steps", r.value.steps},
            {"max_gamma_first", r.max_gamma_first},
            {"min_gamma_second", r.min_gamma_second},
            {"bracket_width", r.bracket_width},
            {"first_ok", r.first_ok},
            {"second_ok", r.second_ok},
            {"bounds_ok", r.bounds_ok},
            {"runs", r.samples.size()}};
}

json value_results(const ValueSweepReport& r) {
    json rows = json::array();
    for (const auto& row : r.table.rows) {
        json x = {{"h", row.h}, {"value", row.value}, {"gap", row.gap}};
        x["cauchy"] = std::isnan(row.cauchy) ? json(nullptr) : json(row.cauchy);
        rows.push_back(x);
    }
    json j = {{"rows", rows}, {"estimate", r.table.estimate}, {"shrinking", r.shrinking}};
    j["error_bar"] = std::isfinite(r.table.error_bar) ? json(r.table.error_bar) : json(nullptr);
    if (r.reference) {
        j["reference"] = *r.reference;
        j["near_reference"] = r.near_reference;
    }
    return j;
}

json single_results(const SingleRunReport& r) {
    auto one = [](const strat::GameRunResult& g) {
        return json{{"gamma", g.gamma},
                    {"gamma_h", g.gamma_h},
                    {"max_deviation", g.max_deviation},
                    {"max_norm", g.apriori.max_norm},
                    {"holder_excess", g.apriori.holder_excess},
                    {"bounds_ok", g.apriori.holds},
                    {"guide_lipschitz", g.guide_lipschitz.max_quotient}};
    };
    return {{"value", r.value.value},
            {"lower", r.value.detail.lower},
            {"upper", r.value.detail.upper},
            {"first", one(r.first)},
            {"second", one(r.second)}};
}

json condition_results(const ConditionReport& r) {
    return {{"probes", r.probes},
            {"isaacs_max_gap", r.isaacs.max_gap},
            {"growth_ratio", r.bounds.growth_ratio},
            {"lipschitz_ratio", r.bounds.lipschitz_ratio},
            {"warnings", r.warnings}};
}

}  // namespace fracgame::harness
