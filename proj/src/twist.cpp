#include "senergy/twist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "senergy/error.hpp"

namespace senergy {

TwistStep::TwistStep(Rank u_, Rank v_, double rho_) : u(u_), v(v_), rho(rho_) {
    if (!(u < v)) throw ParameterError("twist window needs u < v");
    if (!(rho > 0.0 && rho <= 0.5)) throw ParameterError("rho must lie in (0, 1/2]");
}

namespace {

void require_window(std::span<const double> x, const TwistStep& step) {
    if (step.v >= x.size()) {
        throw ParameterError("twist window [" + std::to_string(step.u) + ", " + std::to_string(step.v) +
                             "] exceeds n = " + std::to_string(x.size()));
    }
}

}  // namespace

TwistInterval twist_interval(std::span<const double> x, const TwistStep& step, Rank i) {
    require_window(x, step);
    if (i < step.u || i > step.v) {
        throw ParameterError("rank " + std::to_string(i) + " outside twist window");
    }
    const double xu = x[step.u];
    const double xv = x[step.v];
    const double right_nb = x[std::min(i + 1, step.v)];
    const double left_nb = x[i > step.u ? i - 1 : step.u];
    return {i, xu + step.rho * (right_nb - xu), xv - step.rho * (xv - left_nb)};
}

ValidationReport validate_twist_step(std::span<const double> x, const TwistStep& step,
                                     std::span<const double> y, double tol) {
    if (x.size() != y.size()) throw DimensionError("twist step endpoints differ in size");
    require_window(x, step);
    ValidationReport report;
    for (Rank i = 0; i + 1 < y.size(); ++i) {
        if (y[i] > y[i + 1]) {
            report.violations.push_back({ViolationKind::order, i, y[i + 1], y[i], y[i + 1] - y[i]});
        }
    }
    for (Rank i = 0; i < x.size(); ++i) {
        if (i < step.u || i > step.v) {
            if (y[i] != x[i]) {
                report.violations.push_back({ViolationKind::frozen, i, x[i], y[i], -std::abs(y[i] - x[i])});
            }
            continue;
        }
        const auto tau = twist_interval(x, step, i);
        if (y[i] < tau.lo - tol) {
            report.violations.push_back({ViolationKind::lower, i, tau.lo, y[i], y[i] - tau.lo});
        }
        if (y[i] > tau.hi + tol) {
            report.violations.push_back({ViolationKind::upper, i, tau.hi, y[i], tau.hi - y[i]});
        }
    }
    return report;
}

double twist_step_energy(std::span<const double> x, const TwistStep& step, double s) {
    require_exponent(s);
    require_window(x, step);
    return spow(x[step.v] - x[step.u], s);
}

std::vector<double> leftmost_twist_move(std::span<const double> x, const TwistStep& step) {
    require_window(x, step);
    std::vector<double> y(x.begin(), x.end());
    for (Rank i = step.u; i <= step.v; ++i) y[i] = twist_interval(x, step, i).lo;
    return y;
}

std::vector<double> random_twist_move(std::span<const double> x, const TwistStep& step, Rng& rng) {
    require_window(x, step);
    std::vector<double> y(x.begin(), x.end());
    double floor = step.u > 0 ? x[step.u - 1] : 0.0;
    for (Rank i = step.u; i <= step.v; ++i) {
        const auto tau = twist_interval(x, step, i);
        // Both ends of tau_i are nondecreasing in i, so floor <= tau.hi.
        const double lo = std::max(tau.lo, floor);
        const double hi = std::max(tau.hi, lo);
        y[i] = lo + (hi - lo) * rng.uniform();
        y[i] = std::clamp(y[i], lo, hi);
        floor = y[i];
    }
    return y;
}

}  // namespace senergy
