#pragma once

// Factoring one averaging step into twist substeps, one per nondegenerate
// component of the step's interval union, with identical total energy.

#include <span>
#include <vector>

#include "senergy/core.hpp"
#include "senergy/error.hpp"
#include "senergy/trace.hpp"
#include "senergy/twist.hpp"

namespace senergy {

struct TwistSubstep {
    TwistStep step;
    std::vector<double> before;  // sorted, by rank
    std::vector<double> after;   // sorted, by rank
};

// Refusal raised when the averaging step being reduced is itself invalid.
class ReductionRefused : public Error {
public:
    ReductionRefused(const std::string& what, ValidationReport report)
        : Error(what), report_(std::move(report)) {}
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

// Components are processed left to right. The substep for component I
// moves the ranks [u, v] whose positions lie in I to the sorted targets of
// those agents and holds everything else fixed. After the last substep the
// positions equal sorted(y). Self-loop-only graphs give no substeps.
std::vector<TwistSubstep> reduce_step(const Configuration& x, const StepGraph& g, const Configuration& y,
                                      const AveragingParams& p);

struct TauCondReport {
    std::vector<double> upper_slack;  // x_v - rho (x_v - x_{max(i-1,u)}) - y_i, per rank in [u, v]
    std::vector<double> lower_slack;  // y_i - x_u - rho (x_{min(i+1,v)} - x_u)
    double min_slack = 0.0;

    bool ok(double tol = kDefaultTolerance) const { return min_slack >= -tol; }
};

// Per-agent slack of both twist bounds over the substep's window.
TauCondReport verify_taucond(std::span<const double> x, const TwistStep& step, std::span<const double> y);

// Reduces every record of an averaging (or stochastic) trace into a twist
// trace. Throws ReductionRefused on the first invalid record.
Trace reduce_trace(const Trace& trace);

}  // namespace senergy
