#pragma once

// Twist systems: order-preserving dynamics where the agents of a window
// [u, v] move inside their twist intervals and everyone else stays put.
// Configurations are plain sorted position vectors indexed by rank.

#include <span>
#include <vector>

#include "senergy/core.hpp"

namespace senergy {

struct TwistStep {
    Rank u = 0;
    Rank v = 1;
    double rho = 0.5;

    TwistStep() = default;
    // Throws ParameterError unless u < v and 0 < rho <= 1/2.
    TwistStep(Rank u, Rank v, double rho);
};

struct TwistInterval {
    Rank agent = 0;
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double p, double tol = 0.0) const { return lo - tol <= p && p <= hi + tol; }
};

// tau_i = [x_u + rho (x_{min(i+1,v)} - x_u), x_v - rho (x_v - x_{max(i-1,u)})].
// Throws ParameterError when i lies outside [u, v] or the window exceeds x.
TwistInterval twist_interval(std::span<const double> x, const TwistStep& step, Rank i);

// ok iff y is nondecreasing, y_i lies in tau_i (within tol) on the window, and
// y_i == x_i exactly outside it. Violation indices are ranks.
ValidationReport validate_twist_step(std::span<const double> x, const TwistStep& step,
                                     std::span<const double> y, double tol = kDefaultTolerance);

// (x_v - x_u)^s
double twist_step_energy(std::span<const double> x, const TwistStep& step, double s);

// Leftmost point of every twist interval; always a feasible (sorted) move.
std::vector<double> leftmost_twist_move(std::span<const double> x, const TwistStep& step);

// Feasible random move: left-to-right, each y_i drawn uniformly from
// tau_i intersected with [y_{i-1}, +inf).
std::vector<double> random_twist_move(std::span<const double> x, const TwistStep& step, Rng& rng);

}  // namespace senergy
