#pragma once

// Lower-bound side: the recursive single-edge construction that forces many
// long communications, and the recurrences that count them.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "senergy/trace.hpp"

namespace senergy {

struct LowerBoundRun {
    Trace trace;
    std::size_t edge_steps = 0;      // single-edge steps (length >= eps by construction)
    std::size_t collapse_steps = 0;  // sub-group collapses, all edges shorter than eps
    // Set when double precision could no longer separate the active
    // interval's endpoints and the construction stopped early.
    bool precision_exhausted = false;
};

// Agents 0..n-2 start at 0 and agent n-1 at 1. Each round applies the edge
// (n-2, n-1) with the extremal placement a + rho (b - a), b - rho (b - a),
// then lets agents 0..n-2 recurse inside [a, a + rho (b - a)] until their
// interval is shorter than eps, collapses them to their mass center (a
// step whose edges are all shorter than eps), and repeats on the remaining
// interval. Stops when b - a < eps. eps >= 1 gives an empty trace.
// Requires n >= 2, 0 < rho <= 1/3, eps > 0.
LowerBoundRun lb_trajectory(std::size_t n, double rho, double eps);

struct RecurrenceValue {
    std::uint64_t count = 0;
    bool overflow = false;  // evaluation budget exhausted; count is a partial sum
};

// C(n, eps) = 1 + C(n-1, eps / rho) + C(n, eps / (1 - rho n / (n-1))), with
// C = 0 when n = 1 or eps > 1. tie_tolerance widens the base case to
// eps > 1 - tie_tolerance, which only lowers the result; pass a small value
// when comparing against a floating-point run where exact ties may round
// either way.
RecurrenceValue lb_recurrence_b(std::size_t n, double eps, double rho, double tie_tolerance = 0.0,
                                std::uint64_t budget = 50'000'000);

struct ClosedFormB {
    std::uint64_t k = 0;
    double side_lhs = 0.0;  // rho (1 - 2 rho)^{k-1}
    double side_rhs = 0.0;  // eps^{1/n}
    bool side_ok = false;
    double estimate = 0.0;    // E(n, eps) = k + k E(n-1, eps / (rho (1-2rho)^{k-1})), E(2, .) = k
    double asymptotic = 0.0;  // ((1 / (rho n)) log(1/eps))^{n-1}
};

// Throws OutOfRegime unless n >= 2, rho <= 1/3 and eps <= rho^{2n}.
ClosedFormB lb_closedform_b(std::size_t n, double eps, double rho);

// E_n = (rho^s E_{n-1} + 1) / (1 - (1 - 2 rho)^s), E_1 = 0.
double lb_recurrence_a(std::size_t n, double s, double rho);

struct SandwichRow {
    std::size_t n = 0;
    double rho = 0.0;
    double eps = 0.0;
    std::uint64_t lower = 0;
    bool lower_overflow = false;
    std::size_t measured = 0;
    double upper = 0.0;
    double fitted_ratio = 0.0;  // measured / ((1 / (rho n)) log(1/eps))^{n-1}
    bool precision_exhausted = false;

    bool ordered() const {
        return !lower_overflow && static_cast<double>(lower) <= static_cast<double>(measured) &&
               static_cast<double>(measured) <= upper;
    }
};

// Runs the construction and evaluates both sides for one (n, rho, eps).
SandwichRow lb_sandwich(std::size_t n, double rho, double eps);

}  // namespace senergy
