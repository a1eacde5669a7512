// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracgame/dynamics.hpp"
#include "fracgame/fractional.hpp"
#include "fracgame/harness.hpp"
#include "fracgame/value.hpp"
#include "oracles.hpp"

using namespace fracgame;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double time_limit;  // seconds
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Trajectories produced by criteria 4 to 6, checked by criterion 7.
struct BoundsLedger {
    std::size_t runs = 0;
    std::size_t violations = 0;
    void add(bool ok) {
        ++runs;
        if (!ok) ++violations;
    }
} ledger;

Game builtin(const char* name) { return harness::build_game(harness::load_scenario(name)); }

Outcome fractional_kernel() {
    Outcome o;
    auto phi = [](double t) { return Vec{std::sin(3.0 * t) + t * t, t * std::exp(-t)}; };
    double worst_ratio = 1e300;
    for (double alpha : {0.3, 0.5, 0.8}) {
        std::vector<double> errs;
        for (std::size_t n : {128u, 256u, 512u, 1024u}) {
            const auto f = sample(phi, 0.0, 1.0 / static_cast<double>(n), n);
            const auto back = frac::caputo_derivative(frac::rl_integral(f, alpha), frac::FractionalOrder(alpha));
            double e = 0.0;
            for (std::size_t k = 1; k < f.size(); ++k)
                for (std::size_t d = 0; d < 2; ++d) e = std::max(e, std::abs(back[k][d] - f[k][d]));
            errs.push_back(e);
        }
        for (std::size_t i = 1; i < errs.size(); ++i) worst_ratio = std::min(worst_ratio, errs[i - 1] / errs[i]);
    }
    double worst_ml = 0.0;
    for (double alpha : {0.3, 0.5, 0.8})
        for (int i = 0; i <= 60; ++i) {
            const double z = 0.05 * i;
            const double ref = oracle::mittag_leffler(alpha, z);
            worst_ml = std::max(worst_ml, std::abs(frac::mittag_leffler(alpha, z) - ref) / ref);
        }
    o.pass = worst_ratio >= 1.5 && worst_ml <= 1e-10;
    o.detail = "min round-trip refinement ratio " + fmt("%.3f", worst_ratio) + " (need >= 1.5), max ML rel err " +
               fmt("%.2e", worst_ml) + " (need <= 1e-10)";
    return o;
}

Outcome solver_oracles() {
    const double alpha = 0.5;
    const std::size_t n = 1u << 12;
    const double step = 1.0 / static_cast<double>(n);
    const auto U = dyn::ControlSet(std::vector<Vec>{{0.0}});
    const dyn::ControlSignal zero(0.0, 1.0, Vec{0.0});
    const auto init = dyn::Position::constant(0.0, 0.0, step, {1.0});

    const auto xe = dyn::solve_caputo(dyn::affine_dynamics(1.0, {0.0}, U, U), init, zero, zero, 1.0, alpha, step);
    double err_ml = 0.0;
    for (std::size_t k = 0; k < xe.w.size(); k += 16)
        err_ml = std::max(err_ml, std::abs(xe.w[k][0] - oracle::mittag_leffler(alpha, std::sqrt(xe.w.time(k)))));

    const auto x1 = dyn::solve_caputo(dyn::affine_dynamics(0.0, {1.0}, U, U), dyn::Position::constant(0.0, 0.0, step, {0.0}),
                                      zero, zero, 1.0, alpha, step);
    double err_one = 0.0;
    for (std::size_t k = 0; k < x1.w.size(); ++k)
        err_one = std::max(err_one, std::abs(x1.w[k][0] - std::pow(x1.w.time(k), alpha) / std::tgamma(alpha + 1.0)));

    return {err_ml <= 1e-3 && err_one <= 1e-6, "f = x max err " + fmt("%.3e", err_ml) + " (need <= 1e-3), f = 1 max err " +
                                                    fmt("%.3e", err_one) + " (need <= 1e-6)"};
}

Outcome gl_suite() {
    bool ok = true;
    for (double beta : {0.2, 0.5, 0.8}) {
        const auto gl = frac::gl_coefficients(frac::FractionalOrder(1.0 - beta), 10001);
        const auto S = gl.partial_sums();
        ok = ok && gl.coeffs[0] == 1.0 && S[0] > 0.0;
        for (std::size_t i = 1; i < gl.coeffs.size(); ++i) ok = ok && gl.coeffs[i] < 0.0 && S[i] > 0.0 && S[i] < S[i - 1];
    }
    return {ok, "beta in {0.2, 0.5, 0.8}, i <= 10000: c_0 = 1, c_i < 0, partial sums positive and strictly decreasing"};
}

Outcome proximity_sweep() {
    const auto game = builtin("linear_scalar");
    harness::RunSettings s = harness::load_scenario("linear_scalar").defaults;
    s.sweep_k = {4, 5, 6, 7, 8};
    s.adversaries = 20;
    const auto r = harness::run_lemma2_experiment(game, s);

    std::map<std::pair<std::string, int>, double> worst;
    for (const auto& smp : r.samples) {
        auto& w = worst[{smp.procedure, smp.k}];
        w = std::max(w, smp.max_deviation);
        ledger.add(smp.bounds_ok);
    }
    bool ok = true;
    std::ostringstream os;
    for (const char* proc : {"first", "second"}) {
        os << proc << ":";
        for (int k = 4; k <= 8; ++k) {
            const double d = worst[{proc, k}];
            os << " " << fmt("%.4f", d);
            if (k > 4 && d > 1.1 * worst[{proc, k - 1}]) ok = false;
        }
        if (worst[{proc, 8}] > 0.1) ok = false;
        os << "; ";
    }
    os << "need non-increasing within 10% and <= 0.1 at k = 8";
    return {ok, os.str()};
}

Outcome value_convergence() {
    const auto game = builtin("linear_scalar");
    const auto t = value::value_convergence_sweep(game, game.init, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    const double oracle_value = -0.5 / std::tgamma(1.5);
    bool ok = true;
    std::ostringstream os;
    os << "values";
    for (const auto& row : t.rows) os << " " << fmt("%.5f", row.value);
    os << "; cauchy ratios";
    for (std::size_t i = 2; i < t.rows.size(); ++i) {
        const double ratio = t.rows[i - 1].cauchy / t.rows[i].cauchy;
        os << " " << fmt("%.2f", ratio);
        ok = ok && ratio >= 1.3;
    }
    const double err = std::abs(t.rows.back().value - oracle_value);
    ok = ok && err <= 0.05;
    os << " (need >= 1.3); |value(1/64) - oracle| " << fmt("%.4f", err) << " (need <= 0.05)";
    return {ok, os.str()};
}

Outcome theorem1_sandwich() {
    bool ok = true;
    std::ostringstream os;
    for (const char* name : {"linear_scalar", "pursuit_2d"}) {
        const auto game = builtin(name);
        harness::RunSettings s = harness::load_scenario(name).defaults;
        s.h = s.diam = 1.0 / 32;
        s.zeta = 0.1;
        s.adversaries = 20;
        const auto r = harness::run_theorem1_experiment(game, s);
        const double G = r.value.value;
        std::size_t bad_first = 0, bad_second = 0, runs_first = 0, runs_second = 0;
        double hi = -1e300, lo = 1e300;
        for (const auto& smp : r.samples) {
            ledger.add(smp.bounds_ok);
            if (smp.procedure == "first") {
                ++runs_first;
                hi = std::max(hi, smp.gamma);
                if (smp.gamma > G + 0.1) ++bad_first;
            } else {
                ++runs_second;
                lo = std::min(lo, smp.gamma);
                if (smp.gamma < G - 0.1) ++bad_second;
            }
        }
        ok = ok && bad_first == 0 && bad_second == 0 && runs_first == 20 && runs_second == 20;
        os << name << ": G " << fmt("%.4f", G) << ", max gamma first " << fmt("%.4f", hi) << " (" << bad_first
           << "/20 above G + 0.1), min gamma second " << fmt("%.4f", lo) << " (" << bad_second << "/20 below G - 0.1); ";
    }
    return {ok, os.str()};
}

Outcome a_priori_bounds() {
    return {ledger.runs > 0 && ledger.violations == 0,
            std::to_string(ledger.runs) + " trajectories from criteria 4-6, " + std::to_string(ledger.violations) +
                " violate |x| <= R1 + tol or the Holder bound with H1 (tol = 10 grid_step^alpha)"};
}

Outcome bridge() {
    const double alpha = 0.5;
    const auto U = dyn::ControlSet(std::vector<Vec>{{0.0}});
    const auto d = dyn::affine_dynamics(0.0, {1.0}, U, U);
    std::vector<double> errs;
    for (std::size_t n : {1u << 10, 1u << 11, 1u << 12}) {
        const double step = 1.0 / static_cast<double>(n);
        const dyn::ControlSignal zero(0.0, 1.0, Vec{0.0});
        const auto x = dyn::solve_caputo(d, dyn::Position::constant(0.0, 0.0, step, {0.5}), zero, zero, 1.0, alpha, step);
        errs.push_back(value::representation_bridge(x, alpha).reconstruction_error);
    }
    const bool ok = errs[2] <= 1e-3 && errs[1] < errs[0] && errs[2] < errs[1];
    return {ok, "round-trip error at N = 2^10, 2^11, 2^12: " + fmt("%.3e", errs[0]) + ", " + fmt("%.3e", errs[1]) +
                    ", " + fmt("%.3e", errs[2]) + " (need decreasing and <= 1e-3 at 2^12)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    const std::vector<std::string> verbs = {
        "run linear_scalar --seed 7",
        "run pursuit_2d --seed 7",
        "sweep-deviation linear_scalar --k-list 4,5,6 --adversaries 4 --seed 7",
        "sweep-value linear_scalar --h-list 0.125,0.0625,0.03125",
        "theorem1 pursuit_2d --adversaries 3 --seed 7",
        "check linear_scalar",
        "check pursuit_2d",
    };
    const fs::path root = fs::temp_directory_path() / "fracgame_acceptance_determinism";
    fs::remove_all(root);
    std::size_t files = 0, mismatches = 0;
    for (std::size_t i = 0; i < verbs.size(); ++i) {
        fs::path dirs[2] = {root / (std::to_string(i) + "a"), root / (std::to_string(i) + "b")};
        for (const auto& dir : dirs) {
            fs::create_directories(dir);
            const std::string cmd =
                std::string(FRACGAME_CLI_PATH) + " " + verbs[i] + " --out " + dir.string() + " > " + (dir / "stdout.txt").string() + " 2>/dev/null";
            const int rc = std::system(cmd.c_str());
            if (!WIFEXITED(rc) || WEXITSTATUS(rc) == 2) ++mismatches;
        }
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            ++files;
            if (slurp(e.path()) != slurp(dirs[1] / e.path().filename())) ++mismatches;
        }
    }
    fs::remove_all(root);
    return {mismatches == 0 && files > 0,
            std::to_string(files) + " files over " + std::to_string(verbs.size()) + " invocations, " +
                std::to_string(mismatches) + " differ"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "fractional kernel: round trip and Mittag-Leffler", 10, fractional_kernel},
        {2, "solver oracle equivalence", 30, solver_oracles},
        {3, "Grunwald-Letnikov coefficient suite", 1, gl_suite},
        {4, "system/guide proximity sweep", 300, proximity_sweep},
        {5, "value convergence", 600, value_convergence},
        {6, "two-sided guarantees against random adversaries", 600, theorem1_sandwich},
        {7, "a-priori bounds on produced trajectories", 1e300, a_priori_bounds},
        {8, "representation bridge round trip", 10, bridge},
        {9, "determinism of CLI outputs", 1e300, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %d: %s | %s | %.2f s", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
        if (c.time_limit < 1e300) std::printf(" (limit %.0f s)", c.time_limit);
        std::printf("\n");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
