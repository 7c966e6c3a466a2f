#include "senergy/reduction.hpp"

#include <algorithm>

#include "senergy/error.hpp"

namespace senergy {

std::vector<TwistSubstep> reduce_step(const Configuration& x, const StepGraph& g, const Configuration& y,
                                      const AveragingParams& p) {
    auto report = validate_averaging_step(x, g, y, p);
    if (!report.ok()) {
        auto message = "cannot reduce an invalid averaging step: " + report.describe();
        throw ReductionRefused(std::move(message), std::move(report));
    }

    std::vector<TwistSubstep> substeps;
    std::vector<double> current = x.sorted();
    const std::size_t n = x.size();
    Rank cursor = 0;
    for (const Interval& component : interval_union(g, x)) {
        // Ranks are sorted by position, so the agents inside a component form
        // a contiguous run starting where the previous component ended.
        while (cursor < n && x[cursor] < component.lo) ++cursor;
        const Rank u = cursor;
        while (cursor < n && x[cursor] <= component.hi) ++cursor;
        if (component.degenerate()) continue;
        const Rank v = cursor - 1;

        std::vector<double> targets;
        targets.reserve(v - u + 1);
        for (Rank r = u; r <= v; ++r) targets.push_back(y.position_of(x.id_at(r)));
        std::sort(targets.begin(), targets.end());

        TwistSubstep sub{TwistStep(u, v, p.rho), current, current};
        std::copy(targets.begin(), targets.end(), sub.after.begin() + static_cast<std::ptrdiff_t>(u));
        current = sub.after;
        substeps.push_back(std::move(sub));
    }
    return substeps;
}

TauCondReport verify_taucond(std::span<const double> x, const TwistStep& step, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("substep endpoints differ in size");
    TauCondReport out;
    bool first = true;
    for (Rank i = step.u; i <= step.v; ++i) {
        const auto tau = twist_interval(x, step, i);
        const double up = tau.hi - y[i];
        const double down = y[i] - tau.lo;
        out.upper_slack.push_back(up);
        out.lower_slack.push_back(down);
        const double m = std::min(up, down);
        out.min_slack = first ? m : std::min(out.min_slack, m);
        first = false;
    }
    return out;
}

Trace reduce_trace(const Trace& trace) {
    if (trace.kind == TraceKind::twist) return trace;
    Trace out;
    out.kind = TraceKind::twist;
    out.n = trace.n;
    out.params = trace.params;
    out.asymmetric = trace.asymmetric;
    out.truncation = trace.truncation;
    std::size_t t = 0;
    for (const auto& rec : trace.records) {
        for (auto& sub : reduce_step(rec.before, rec.graph, rec.after, trace.params)) {
            TraceRecord r;
            r.t = t;
            r.window = TwistWindow{sub.step.u, sub.step.v};
            r.before = Configuration(std::move(sub.before), t);
            r.after = Configuration(std::move(sub.after), t + 1);
            out.records.push_back(std::move(r));
            ++t;
        }
    }
    return out;
}

}  // namespace senergy
