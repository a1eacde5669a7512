#pragma once

// Small game instances shared by the unit tests.

#include <string>
#include <utility>

#include "fracgame/game.hpp"
#include "fracgame/harness.hpp"

namespace testgames {

using fracgame::Game;
using fracgame::Vec;
using fracgame::dyn::ControlSet;

inline ControlSet scalar_set(std::initializer_list<double> values) {
    std::vector<Vec> pts;
    for (double v : values) pts.push_back({v});
    return ControlSet(pts);
}

/// Scalar f = c, single-point control sets.
inline fracgame::dyn::Dynamics constant_rhs(double c) {
    return fracgame::dyn::affine_dynamics(0.0, {c}, scalar_set({0.0}), scalar_set({0.0}));
}

/// Scalar f = a x.
inline fracgame::dyn::Dynamics linear_rhs(double a) {
    return fracgame::dyn::affine_dynamics(a, {0.0}, scalar_set({0.0}), scalar_set({0.0}));
}

/// The linear_scalar scenario with selected fields replaced.
inline Game scenario_game(const std::string& name, const fracgame::harness::json& patch = fracgame::harness::json::object()) {
    auto j = fracgame::harness::scenario_to_json(fracgame::harness::load_scenario(name));
    j.merge_patch(patch);
    return fracgame::harness::build_game(fracgame::harness::parse_scenario(j));
}

/// f = u + v on U = {-1, 0, 1}, V = {-1/2, 0, 1/2}, sigma = x(1).
inline Game linear_scalar(double grid_step = 1.0 / 256) {
    return scenario_game("linear_scalar", {{"grid_step", grid_step}});
}

/// f = 0 with sigma = |x(1)| and w0 = (0.6, -0.8).
inline Game still_game() {
    using fracgame::harness::json;
    return scenario_game("pursuit_2d", {{"controls", {{"U", json::array({json::array({0.0, 0.0})})},
                                                      {"V", json::array({json::array({0.0, 0.0})})}}},
                                        {"initial", {{"w0", {0.6, -0.8}}}}});
}

}  // namespace testgames
