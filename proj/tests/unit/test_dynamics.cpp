#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracgame/dynamics.hpp"
#include "fracgame/errors.hpp"
#include "games.hpp"
#include "oracles.hpp"

using namespace fracgame;
using namespace fracgame::dyn;
using testgames::scalar_set;

namespace {

Position solve_constant_controls(const Dynamics& d, const Position& init, double T, double alpha, double step) {
    const ControlSignal zero(init.t(), T, Vec{0.0});
    return solve_caputo(d, init, zero, zero, T, alpha, step);
}

std::vector<ConditionProbe> scalar_probes() {
    std::vector<ConditionProbe> out;
    for (double t : {0.0, 0.5, 1.0})
        for (double x : {-2.0, 0.0, 1.5})
            for (double s : {-1.0, 0.0, 0.3, 2.0}) out.push_back({t, {x}, {s}});
    return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("control sets validate their points") {
    CHECK_THROWS_AS(ControlSet(std::vector<Vec>{}), ContractError);
    CHECK_THROWS_AS(ControlSet(std::vector<Vec>{{0.0}, {0.0, 1.0}}), ContractError);
    const auto U = scalar_set({-1.0, 0.0, 2.0});
    CHECK(U.max_norm() == 2.0);
    CHECK(U.find(Vec{0.0}) == 1);
    CHECK(U.find(Vec{0.5}) == U.size());
}

TEST_CASE("control signals are right-continuous step functions") {
    ControlSignal s({0.0, 0.25, 0.5}, {{1.0}, {2.0}, {3.0}}, 1.0);
    CHECK(s.at(0.0)[0] == 1.0);
    CHECK(s.at(0.2499)[0] == 1.0);
    CHECK(s.at(0.25)[0] == 2.0);
    CHECK(s.at(0.75)[0] == 3.0);
    CHECK(s.at(1.0)[0] == 3.0);
    CHECK_THROWS_AS(s.at(1.5), ContractError);

    ControlSignal a(0.0, 0.5, Vec{1.0});
    a.append(0.75, Vec{1.0});
    CHECK(a.switch_times().size() == 1);
    a.append(1.0, Vec{-1.0});
    CHECK(a.switch_times().size() == 2);
    CHECK(a.at(0.9)[0] == -1.0);
}

TEST_CASE("concatenation with an empty tail is the identity") {
    const ControlSignal a({0.0, 0.5}, {{1.0}, {0.0}}, 1.0);
    CHECK(concatenate_controls(a, ControlSignal::empty_at(1.0)) == a);
    const ControlSignal b(1.0, 2.0, Vec{4.0});
    const auto c = concatenate_controls(a, b);
    CHECK(c.t_begin() == 0.0);
    CHECK(c.t_end() == 2.0);
    CHECK(c.at(1.5)[0] == 4.0);
    CHECK_THROWS_AS(concatenate_controls(a, ControlSignal(1.25, 2.0, Vec{0.0})), ContractError);
}

TEST_CASE("bound constants") {
    const auto zero = bound_constants(0.0, 1.5, 0.0, 1.0, 0.5);
    CHECK(zero.R1 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(zero.M1 == 0.0);

    const auto b = bound_constants(1.0, 1.0, 0.0, 1.0, 0.5);
    CHECK(b.R1 == doctest::Approx(2.0 * oracle::mittag_leffler(0.5, 1.0) - 1.0).epsilon(1e-12));
    for (double c : {0.3, 1.0, 2.5}) {
        const auto bc = bound_constants(c, 0.7, 0.0, 2.0, 0.3);
        CHECK(bc.M1 == doctest::Approx((1.0 + bc.R1) * c).epsilon(1e-14));
        CHECK(bc.H == doctest::Approx(2.0 / std::tgamma(1.3)).epsilon(1e-14));
        CHECK(bc.H1 == doctest::Approx(bc.H * bc.M1).epsilon(1e-14));
    }
}

TEST_CASE("saddle-point probe") {
    const auto probes = scalar_probes();
    const auto U = scalar_set({-1.0, 0.0, 1.0});
    const auto V = scalar_set({-0.5, 0.0, 0.5});
    CHECK(check_isaacs(affine_dynamics(0.0, {0.0}, U, V), U, V, probes).max_gap == 0.0);

    const auto V1 = scalar_set({0.7});
    CHECK(check_isaacs(bilinear_dynamics(U, V1), U, V1, probes).max_gap == 0.0);

    const auto Ua = scalar_set({-1.0, 0.5});
    const auto Va = scalar_set({-1.0, 2.0});
    const auto rep = check_isaacs(bilinear_dynamics(Ua, Va), Ua, Va, probes);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const double s = probes[k].s[0];
        double minmax = 1e300, maxmin = -1e300;
        for (double u : {-1.0, 0.5}) {
            double m = -1e300;
            for (double v : {-1.0, 2.0}) m = std::max(m, s * u * v);
            minmax = std::min(minmax, m);
        }
        for (double v : {-1.0, 2.0}) {
            double m = 1e300;
            for (double u : {-1.0, 0.5}) m = std::min(m, s * u * v);
            maxmin = std::max(maxmin, m);
        }
        CHECK(rep.gaps[k] == doctest::Approx(minmax - maxmin).epsilon(1e-14));
    }
    CHECK(rep.max_gap > 0.0);
}

TEST_CASE("growth and lipschitz probes hold for the library dynamics") {
    const auto probes = scalar_probes();
    const auto U = scalar_set({-1.0, 0.0, 1.0});
    const auto V = scalar_set({-0.5, 0.0, 0.5});
    for (double a : {0.0, -1.0, 2.0}) {
        const auto r = check_bounds(affine_dynamics(a, {0.3}, U, V), U, V, probes, 3.0);
        CHECK(r.growth_ratio <= 1.0 + 1e-12);
        CHECK(r.lipschitz_ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("solver oracles") {
    const double alpha = 0.5;
    SUBCASE("f = 0") {
        const auto init = Position::constant(0.0, 0.25, 1.0 / 64, {0.3});
        const auto x = solve_constant_controls(testgames::constant_rhs(0.0), init, 1.0, alpha, 1.0 / 64);
        for (std::size_t k = 0; k < x.w.size(); ++k) CHECK(x.w[k][0] == 0.3);
    }
    SUBCASE("f = 1") {
        for (double a : {0.3, 0.5, 0.8}) {
            const auto init = Position::constant(0.0, 0.0, 1.0 / 256, {0.2});
            const auto x = solve_constant_controls(testgames::constant_rhs(1.0), init, 1.0, a, 1.0 / 256);
            double err = 0.0;
            for (std::size_t k = 0; k < x.w.size(); ++k)
                err = std::max(err, std::abs(x.w[k][0] - 0.2 - std::pow(x.w.time(k), a) / std::tgamma(a + 1.0)));
            CHECK(err < 1e-12);
        }
    }
    SUBCASE("f = x converges to the mittag-leffler solution") {
        double prev = 0.0;
        for (std::size_t n : {256u, 1024u, 4096u}) {
            const double step = 1.0 / static_cast<double>(n);
            const auto init = Position::constant(0.0, 0.0, step, {1.0});
            const auto x = solve_constant_controls(testgames::linear_rhs(1.0), init, 1.0, alpha, step);
            double err = 0.0;
            for (std::size_t k = 0; k < x.w.size(); k += n / 16)
                err = std::max(err, std::abs(x.w[k][0] - oracle::mittag_leffler(alpha, std::sqrt(x.w.time(k)))));
            if (prev > 0.0) CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("switching controls reproduce the piecewise power solution") {
    const double a = 0.5;
    const auto U = scalar_set({-1.0, 0.0, 1.0});
    const auto V = scalar_set({-0.5, 0.0, 0.5});
    const auto d = affine_dynamics(0.0, {0.0}, U, V);
    const std::vector<double> sw{0.0, 0.25, 0.625};
    const ControlSignal u(sw, {{1.0}, {-1.0}, {0.0}}, 1.0);
    const ControlSignal v({0.0, 0.5}, {{0.5}, {-0.5}}, 1.0);
    const auto x = solve_caputo(d, Position::constant(0.0, 0.0, 1.0 / 128, {0.0}), u, v, 1.0, a, 1.0 / 128);

    auto ramp = [a](double t, double from) { return t > from ? std::pow(t - from, a) / std::tgamma(a + 1.0) : 0.0; };
    auto exact = [&](double t) {
        // f = u + v is piecewise constant with jumps at 0.25, 0.5, 0.625
        return 1.5 * ramp(t, 0.0) - 2.0 * ramp(t, 0.25) - 1.0 * ramp(t, 0.5) + 1.0 * ramp(t, 0.625);
    };
    double err = 0.0;
    for (std::size_t k = 0; k < x.w.size(); ++k) err = std::max(err, std::abs(x.w[k][0] - exact(x.w.time(k))));
    CHECK(err < 1e-12);
}

TEST_CASE("staged solves agree with a single solve") {
    const double alpha = 0.5, step = 1.0 / 512;
    for (double a : {0.0, 1.0}) {
        const auto d = a == 0.0 ? testgames::constant_rhs(1.0) : testgames::linear_rhs(a);
        const auto init = Position::constant(0.0, 0.0, step, {1.0});
        const auto whole = solve_constant_controls(d, init, 1.0, alpha, step);
        const auto half = solve_constant_controls(d, init, 0.375, alpha, step);
        const auto rest = solve_constant_controls(d, half, 1.0, alpha, step);
        REQUIRE(rest.w.size() == whole.w.size());
        double diff = 0.0;
        for (std::size_t k = 0; k < whole.w.size(); ++k) diff = std::max(diff, std::abs(rest.w[k][0] - whole.w[k][0]));
        CHECK(diff < 1e-10);
    }
}

TEST_CASE("solver preconditions") {
    const auto U = scalar_set({-1.0, 1.0});
    const auto d = affine_dynamics(0.0, {0.0}, U, U);
    const auto init = Position::constant(0.0, 0.0, 1.0 / 64, {0.0});
    const ControlSignal ok(0.0, 1.0, Vec{1.0});
    const ControlSignal off_grid({0.0, 0.3}, {{1.0}, {-1.0}}, 1.0);
    const ControlSignal short_signal(0.0, 0.5, Vec{1.0});
    CHECK_THROWS_AS(solve_caputo(d, init, off_grid, ok, 1.0, 0.5, 1.0 / 64), ContractError);
    CHECK_THROWS_AS(solve_caputo(d, init, short_signal, ok, 1.0, 0.5, 1.0 / 64), ContractError);

    SolverOptions opts;
    opts.blowup_radius = 0.5;
    CHECK_THROWS_AS(solve_caputo(d, init, ok, ok, 1.0, 0.5, 1.0 / 64, opts), NumericalError);
}

TEST_CASE("admissibility of initial positions") {
    const auto c = Position::constant(0.0, 0.25, 1.0 / 64, {0.5});
    CHECK(check_admissible(c, 1.0, 1.0, 0.5).admissible);
    CHECK_FALSE(check_admissible(c, 1.0, 0.4, 0.5).admissible);

    const auto p = Position::power(0.0, 0.25, 1.0 / 256, {0.0}, {0.8}, 0.5);
    const auto rep = check_admissible(p, 1.0, 1.0, 0.5);
    CHECK(rep.admissible);
    CHECK(rep.consistency_error < 1e-6);

    const auto steep = Position::power(0.0, 0.25, 1.0 / 256, {0.0}, {10.0}, 0.5);
    const auto bad = check_admissible(steep, 1.0, 1.0, 0.5);
    CHECK_FALSE(bad.admissible);
    CHECK(bad.growth_excess > 0.0);

    auto broken = p;
    broken.w[broken.w.size() - 1][0] += 0.1;
    CHECK_FALSE(check_admissible(broken, 1.0, 1.0, 0.5).admissible);
}

TEST_CASE("quality indices") {
    const auto still = Position::constant(0.0, 1.0, 1.0 / 16, {0.6, -0.8});
    CHECK(evaluate_quality(QualityIndex::terminal_norm(), still, 1.0) == doctest::Approx(1.0));
    CHECK(evaluate_quality(QualityIndex::terminal_linear({2.0, 1.0}, 0.5), still, 1.0) == doctest::Approx(0.9));
    CHECK(evaluate_quality(QualityIndex::constant(3.0), still, 1.0) == 3.0);

    const auto rising = solve_constant_controls(testgames::constant_rhs(1.0), Position::constant(0.0, 0.0, 1.0 / 64, {0.1}),
                                                1.0, 0.5, 1.0 / 64);
    const double end = 0.1 + 1.0 / std::tgamma(1.5);
    CHECK(evaluate_quality(QualityIndex::running_max_norm(), rising, 1.0) ==
          doctest::Approx(evaluate_quality(QualityIndex::terminal_norm(), rising, 1.0)));
    CHECK(evaluate_quality(QualityIndex::terminal_linear({1.0}), rising, 1.0) == doctest::Approx(end).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_quality(QualityIndex::terminal_norm(), rising, 2.0), ContractError);
}

TEST_CASE("a-priori bounds on solver trajectories") {
    const auto U = scalar_set({-1.0, 0.0, 1.0});
    const auto V = scalar_set({-0.5, 0.0, 0.5});
    const auto d = affine_dynamics(-0.5, {0.2}, U, V);
    const auto b = bound_constants(d, 1.0, 0.0, 1.0, 0.5);
    const ControlSignal u({0.0, 0.5}, {{1.0}, {-1.0}}, 1.0);
    const ControlSignal v({0.0, 0.25}, {{0.5}, {0.0}}, 1.0);
    const auto x = solve_caputo(d, Position::constant(0.0, 0.0, 1.0 / 128, {1.0}), u, v, 1.0, 0.5, 1.0 / 128);
    const auto rep = check_apriori_bounds(x.w, b, 0.5);
    CHECK(rep.holds);
    CHECK(rep.max_norm <= b.R1);

    auto jump = x.w;
    jump[64][0] += 10.0 * b.H1;
    CHECK_FALSE(check_apriori_bounds(jump, b, 0.5).holds);
}

}  // TEST_SUITE
