#pragma once

// Scenario registry, experiment drivers and report emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracgame/game.hpp"
#include "fracgame/strategies.hpp"
#include "fracgame/value.hpp"

namespace fracgame::harness {

using json = nlohmann::ordered_json;

/// Experiment parameters; scenario files may override the defaults.
struct RunSettings {
    double h = 1.0 / 32;
    double diam = 1.0 / 32;
    double epsilon = 0.1;
    double zeta = 0.1;
    std::uint64_t seed = 1;
    std::size_t adversaries = 20;
    std::size_t value_steps = 8;
    /// Deviation threshold at the finest sweep point.
    double xi = 0.1;
    /// Sweep exponents k with h = delta = 2^-k.
    std::vector<int> sweep_k{4, 5, 6, 7, 8};
    std::vector<double> h_list{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
};

struct ScenarioSpec {
    std::string name;
    double alpha = 0.5;
    double t0 = 0.0;
    double theta = 1.0;
    std::size_t n = 1;
    std::string dynamics_id;
    json dynamics_params = json::object();
    std::vector<Vec> U;
    std::vector<Vec> V;
    std::string sigma_id;
    json sigma_params = json::object();
    double R0 = 1.0;
    Vec w0;
    /// "constant" or "power" (w = w0 + a (t - t0)^alpha)
    std::string segment_kind = "constant";
    double t_star = 0.0;
    Vec segment_coeffs;
    double grid_step = 1.0 / 256;
    std::optional<double> reference_value;
    RunSettings defaults;
};

/// Builtin names: linear_scalar, pursuit_2d.
std::vector<std::string> builtin_names();
/// A builtin name or a path to a JSON file. Throws ConfigError naming the field.
ScenarioSpec load_scenario(const std::string& name_or_path);
ScenarioSpec parse_scenario(const json& j);
json scenario_to_json(const ScenarioSpec& spec);
json settings_to_json(const RunSettings& s);

Game build_game(const ScenarioSpec& spec);

struct ConditionReport {
    dyn::IsaacsReport isaacs;
    dyn::BoundProbeReport bounds;
    std::size_t probes = 0;
    std::vector<std::string> warnings;
    bool ok = true;
};

/// Saddle-point, growth and Lipschitz probes on a fixed deterministic probe set.
ConditionReport probe_conditions(const Game& game);

/// Independent i.i.d. grid indices, one per step, from a seeded stream.
std::vector<std::size_t> random_indices(std::size_t steps, std::size_t grid_size, std::uint64_t seed,
                                        std::initializer_list<std::uint64_t> stream);

struct DeviationSample {
    int k = 0;
    double h = 0.0;
    std::string procedure;
    std::size_t adversary = 0;
    double max_deviation = 0.0;
    double gamma = 0.0;
    double gamma_h = 0.0;
    bool bounds_ok = true;
};

struct DeviationReport {
    std::vector<DeviationSample> samples;
    /// worst deviation per (procedure, k), procedures "first" then "second"
    std::vector<DeviationSample> worst;
    bool monotone = true;
    bool final_within_xi = true;
    bool bounds_ok = true;
    bool pass = false;
};

DeviationReport run_lemma2_experiment(const Game& game, const RunSettings& s);

struct ProcedureSample {
    std::string procedure;
    std::size_t adversary = 0;
    double gamma = 0.0;
    double gamma_h = 0.0;
    double max_deviation = 0.0;
    bool inequality = true;
    bool bounds_ok = true;
};

struct Theorem1Report {
    value::ValueMapResult value;
    std::vector<ProcedureSample> samples;
    double max_gamma_first = 0.0;
    double min_gamma_second = 0.0;
    double bracket_width = 0.0;
    bool first_ok = true;
    bool second_ok = true;
    bool bounds_ok = true;
    bool pass = false;
};

Theorem1Report run_theorem1_experiment(const Game& game, const RunSettings& s);

struct SingleRunReport {
    value::ValueMapResult value;
    strat::GameRunResult first;
    strat::GameRunResult second;
    bool pass = false;
};

/// One run of each procedure against one seeded random adversary.
SingleRunReport run_single(const Game& game, const RunSettings& s);

struct ValueSweepReport {
    value::ConvergenceTable table;
    bool shrinking = true;
    std::optional<double> reference;
    bool near_reference = true;
    bool pass = false;
};

/// Successive differences must shrink by 1.3; the last value must lie within
/// `tolerance` of `reference` when one is given.
ValueSweepReport run_value_sweep(const Game& game, const RunSettings& s, std::optional<double> reference = std::nullopt,
                                 double tolerance = 0.05);

// Emission. Doubles are printed with 17 significant digits; all orderings are fixed.

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);
/// Writes the CSV; throws std::runtime_error naming the path on failure.
void write_csv(const std::string& path, const Table& t);
void write_json(const std::string& path, const json& j);

/// Trajectory table: t, x components, then u, v controls in force at t.
Table trajectory_table(const strat::GameRunResult& r);
/// Guide table on the Euler grid: t, y components, x' components, then p, q.
Table guide_table(const strat::GameRunResult& r);
Table deviation_table(const DeviationReport& r);
Table theorem1_table(const Theorem1Report& r);
Table value_table(const ValueSweepReport& r);

json summary(const std::string& scenario, const json& config, const json& results, bool pass);
json deviation_results(const DeviationReport& r);
json theorem1_results(const Theorem1Report& r);
json value_results(const ValueSweepReport& r);
json single_results(const SingleRunReport& r);
json condition_results(const ConditionReport& r);

}  // namespace fracgame::harness
