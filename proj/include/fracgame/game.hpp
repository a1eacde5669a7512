#pragma once

#include <string>

#include "fracgame/dynamics.hpp"

namespace fracgame {

/// A fully resolved game instance: system, control grids, payoff and initial position.
struct Game {
    std::string name;
    dyn::Dynamics dyn;
    dyn::ControlSet U;
    dyn::ControlSet V;
    dyn::QualityIndex sigma;
    double alpha = 0.5;
    double t0 = 0.0;
    double theta = 1.0;
    double R0 = 1.0;
    /// Initial position (t*, w*(.)) on the solver grid.
    dyn::Position init;
    double grid_step = 0.0;

    dyn::SystemBounds bounds() const { return dyn::bound_constants(dyn, R0, t0, theta, alpha); }
    double t_star() const { return init.t(); }
};

}  // namespace fracgame
