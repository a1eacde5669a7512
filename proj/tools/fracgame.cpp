// Command-line driver: game runs, deviation and value sweeps, the two-sided
// guarantee experiment and condition probes.
//
// Exit status: 0 pass, 1 tolerance failure, 2 configuration error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracgame/errors.hpp"
#include "fracgame/harness.hpp"

namespace fs = std::filesystem;
using namespace fracgame;
using harness::json;

namespace {

struct Options {
    std::string scenario;
    std::optional<double> h, epsilon, diam, zeta, xi;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> adversaries, value_steps;
    std::vector<double> h_list;
    std::vector<int> k_list;
    std::string out;
};

harness::RunSettings resolve(const harness::ScenarioSpec& spec, const Options& o) {
    harness::RunSettings s = spec.defaults;
    if (o.h) s.h = *o.h;
    if (o.epsilon) s.epsilon = *o.epsilon;
    if (o.diam) s.diam = *o.diam;
    if (o.zeta) s.zeta = *o.zeta;
    if (o.xi) s.xi = *o.xi;
    if (o.seed) s.seed = *o.seed;
    if (o.adversaries) s.adversaries = *o.adversaries;
    if (o.value_steps) s.value_steps = *o.value_steps;
    if (!o.h_list.empty()) s.h_list = o.h_list;
    if (!o.k_list.empty()) s.sweep_k = o.k_list;
    if (!(s.h > 0.0)) throw ConfigError("--h", "must be positive");
    if (!(s.diam > 0.0)) throw ConfigError("--diam", "must be positive");
    if (!(s.epsilon > 0.0)) throw ConfigError("--epsilon", "must be positive");
    if (!(s.zeta > 0.0)) throw ConfigError("--zeta", "must be positive");
    if (s.value_steps == 0) throw ConfigError("--value-steps", "must be positive");
    for (double h : s.h_list)
        if (!(h > 0.0)) throw ConfigError("--h-list", "entries must be positive");
    return s;
}

struct Loaded {
    harness::ScenarioSpec spec;
    Game game;
    harness::ConditionReport conditions;
};

Loaded load(const std::string& name) {
    auto spec = harness::load_scenario(name);
    Game game = harness::build_game(spec);
    auto cond = harness::probe_conditions(game);
    for (const auto& w : cond.warnings) std::cerr << "warning: " << spec.name << ": " << w << '\n';
    return {std::move(spec), std::move(game), std::move(cond)};
}

json config_of(const std::string& verb, const harness::ScenarioSpec& spec, const harness::RunSettings& s) {
    return {{"verb", verb}, {"scenario", harness::scenario_to_json(spec)}, {"settings", harness::settings_to_json(s)}};
}

fs::path out_dir(const Options& o) {
    if (o.out.empty()) return {};
    fs::path p(o.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + p.string() + ": " + ec.message());
    return p;
}

int finish(const fs::path& dir, const std::string& name, const json& summary) {
    if (!dir.empty()) harness::write_json((dir / name).string(), summary);
    std::cout << summary.dump(2) << '\n';
    return summary["pass"].get<bool>() ? 0 : 1;
}

int cmd_run(const Options& o) {
    auto L = load(o.scenario);
    const auto s = resolve(L.spec, o);
    const auto r = harness::run_single(L.game, s);
    const auto dir = out_dir(o);
    if (!dir.empty()) {
        harness::write_csv((dir / "run_first_trajectory.csv").string(), harness::trajectory_table(r.first));
        harness::write_csv((dir / "run_first_guide.csv").string(), harness::guide_table(r.first));
        harness::write_csv((dir / "run_second_trajectory.csv").string(), harness::trajectory_table(r.second));
        harness::write_csv((dir / "run_second_guide.csv").string(), harness::guide_table(r.second));
    }
    return finish(dir, "run_summary.json",
                  harness::summary(L.spec.name, config_of("run", L.spec, s), harness::single_results(r), r.pass));
}

int cmd_sweep_deviation(const Options& o) {
    auto L = load(o.scenario);
    const auto s = resolve(L.spec, o);
    const auto r = harness::run_lemma2_experiment(L.game, s);
    const auto dir = out_dir(o);
    if (!dir.empty()) harness::write_csv((dir / "deviation.csv").string(), harness::deviation_table(r));
    return finish(dir, "deviation_summary.json",
                  harness::summary(L.spec.name, config_of("sweep-deviation", L.spec, s), harness::deviation_results(r),
                                   r.pass));
}

int cmd_sweep_value(const Options& o) {
    auto L = load(o.scenario);
    const auto s = resolve(L.spec, o);
    const auto r = harness::run_value_sweep(L.game, s, L.spec.reference_value);
    const auto dir = out_dir(o);
    if (!dir.empty()) harness::write_csv((dir / "value.csv").string(), harness::value_table(r));
    return finish(dir, "value_summary.json",
                  harness::summary(L.spec.name, config_of("sweep-value", L.spec, s), harness::value_results(r),
                                   r.pass));
}

int cmd_theorem1(const Options& o) {
    auto L = load(o.scenario);
    const auto s = resolve(L.spec, o);
    const auto r = harness::run_theorem1_experiment(L.game, s);
    const auto dir = out_dir(o);
    if (!dir.empty()) harness::write_csv((dir / "theorem1.csv").string(), harness::theorem1_table(r));
    return finish(dir, "theorem1_summary.json",
                  harness::summary(L.spec.name, config_of("theorem1", L.spec, s), harness::theorem1_results(r),
                                   r.pass));
}

int cmd_check(const Options& o) {
    auto L = load(o.scenario);
    const auto s = resolve(L.spec, o);
    const auto dir = out_dir(o);
    return finish(dir, "check_summary.json",
                  harness::summary(L.spec.name, config_of("check", L.spec, s),
                                   harness::condition_results(L.conditions), L.conditions.ok));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order differential game engine"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* c) {
        c->add_option("scenario", o.scenario, "builtin name or path to a scenario JSON file")->required();
        c->add_option("--out", o.out, "output directory for CSV/JSON files");
        c->add_option("--seed", o.seed, "seed of the random adversaries");
    };
    auto game_opts = [&o](CLI::App* c) {
        c->add_option("--h", o.h, "guide lattice step");
        c->add_option("--epsilon", o.epsilon, "accuracy parameter (recorded only)");
        c->add_option("--diam", o.diam, "partition diameter");
        c->add_option("--zeta", o.zeta, "target accuracy");
        c->add_option("--value-steps", o.value_steps, "steps of the value partition");
    };

    auto* run = app.add_subcommand("run", "one run of each procedure against a random adversary");
    common(run);
    game_opts(run);
    auto* dev = app.add_subcommand("sweep-deviation", "system/guide deviation over h = delta = 2^-k");
    common(dev);
    dev->add_option("--k-list", o.k_list, "sweep exponents")->delimiter(',');
    dev->add_option("--adversaries", o.adversaries, "random adversaries per sweep point");
    dev->add_option("--xi", o.xi, "deviation threshold at the finest point");
    dev->add_option("--epsilon", o.epsilon, "accuracy parameter (recorded only)");
    auto* val = app.add_subcommand("sweep-value", "value convergence as h decreases");
    common(val);
    val->add_option("--h-list", o.h_list, "decreasing guide steps")->delimiter(',');
    val->add_option("--value-steps", o.value_steps, "steps of the value partition");
    auto* thm = app.add_subcommand("theorem1", "two-sided guarantees against random adversaries");
    common(thm);
    game_opts(thm);
    thm->add_option("--adversaries", o.adversaries, "random adversaries per procedure");
    auto* chk = app.add_subcommand("check", "probe the saddle-point, growth and Lipschitz conditions");
    common(chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (*run) code = cmd_run(o);
        else if (*dev) code = cmd_sweep_deviation(o);
        else if (*val) code = cmd_sweep_value(o);
        else if (*thm) code = cmd_theorem1(o);
        else code = cmd_check(o);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "elapsed " << secs << " s\n";
    return code;
}
