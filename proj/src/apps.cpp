#include "senergy/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "senergy/error.hpp"
#include "senergy/measure.hpp"

namespace senergy {

double Box::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        if (!(side(k) > 0.0)) return 0.0;
        v *= side(k);
    }
    return v;
}

bool Box::contains(const Point& p, double tol) const {
    for (std::size_t k = 0; k < dim(); ++k) {
        if (p[k] < lo[k] - tol || p[k] > hi[k] + tol) return false;
    }
    return true;
}

OpinionState::OpinionState(std::size_t d_, double alpha_, std::vector<Point> points_)
    : d(d_), alpha(alpha_), points(std::move(points_)) {
    if (d == 0) throw ParameterError("opinion dimension must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
    for (const auto& p : points) {
        if (p.size() != d) throw DimensionError("opinion point has the wrong dimension");
        for (double c : p) {
            if (!(c >= 0.0 && c <= 1.0)) throw ParameterError("opinion coordinates must lie in [0, 1]");
        }
    }
}

double OpinionState::spread() const {
    double out = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : points) {
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
        if (!points.empty()) out = std::max(out, hi - lo);
    }
    return out;
}

Box bounding_box(const OpinionState& state, const std::vector<AgentId>& subset) {
    if (subset.empty()) throw ParameterError("opinion step needs a nonempty subset");
    Box b{Point(state.d, std::numeric_limits<double>::infinity()),
          Point(state.d, -std::numeric_limits<double>::infinity())};
    for (AgentId id : subset) {
        if (id >= state.size()) throw ParameterError("subset names an unknown agent");
        for (std::size_t k = 0; k < state.d; ++k) {
            b.lo[k] = std::min(b.lo[k], state.points[id][k]);
            b.hi[k] = std::max(b.hi[k], state.points[id][k]);
        }
    }
    return b;
}

Box shrunken_box(const Box& box, double alpha) {
    const double rho = 0.5 * alpha;
    Box out = box;
    for (std::size_t k = 0; k < box.dim(); ++k) {
        const double delta = rho * (box.hi[k] - box.lo[k]);
        out.lo[k] = box.lo[k] + delta;
        out.hi[k] = box.hi[k] - delta;
    }
    return out;
}

OpinionStepResult opinion_step(const OpinionState& state, const std::vector<AgentId>& subset,
                               const std::vector<Point>& targets, double tol) {
    if (targets.size() != subset.size()) throw DimensionError("one target per chosen agent is required");
    OpinionStepResult out;
    out.record.subset = subset;
    out.record.box = bounding_box(state, subset);
    out.record.volume = out.record.box.volume();
    const Box allowed = shrunken_box(out.record.box, state.alpha);
    for (std::size_t m = 0; m < subset.size(); ++m) {
        if (targets[m].size() != state.d) throw DimensionError("target has the wrong dimension");
        for (std::size_t k = 0; k < state.d; ++k) {
            const double v = targets[m][k];
            const std::size_t index = subset[m] * state.d + k;
            if (v < allowed.lo[k] - tol) {
                out.report.violations.push_back({ViolationKind::lower, index, allowed.lo[k], v, v - allowed.lo[k]});
            }
            if (v > allowed.hi[k] + tol) {
                out.report.violations.push_back({ViolationKind::upper, index, allowed.hi[k], v, allowed.hi[k] - v});
            }
        }
    }
    out.next = state;
    if (!out.report.ok()) return out;
    for (std::size_t m = 0; m < subset.size(); ++m) out.next.points[subset[m]] = targets[m];
    for (AgentId id : subset) {
        out.record.before.push_back(state.points[id]);
        out.record.after.push_back(out.next.points[id]);
    }
    return out;
}

const char* to_string(SqueezePolicy policy) {
    switch (policy) {
        case SqueezePolicy::center: return "center";
        case SqueezePolicy::uniform: return "uniform";
        case SqueezePolicy::corner: return "corner";
    }
    return "?";
}

SqueezePolicy parse_squeeze_policy(const std::string& name) {
    for (auto p : {SqueezePolicy::center, SqueezePolicy::uniform, SqueezePolicy::corner}) {
        if (name == to_string(p)) return p;
    }
    throw ParameterError("unknown squeeze policy '" + name + "'");
}

std::vector<Point> squeeze_targets(const OpinionState& state, const std::vector<AgentId>& subset,
                                   SqueezePolicy policy, Rng& rng) {
    const Box allowed = shrunken_box(bounding_box(state, subset), state.alpha);
    std::vector<Point> targets(subset.size(), Point(state.d));
    Point corner(state.d);
    for (std::size_t k = 0; k < state.d; ++k) corner[k] = rng.bernoulli(0.5) ? allowed.hi[k] : allowed.lo[k];
    for (auto& t : targets) {
        for (std::size_t k = 0; k < state.d; ++k) {
            // Rounding can cross lo and hi when alpha = 1.
            const double lo = std::min(allowed.lo[k], allowed.hi[k]);
            switch (policy) {
                case SqueezePolicy::center: t[k] = 0.5 * (allowed.lo[k] + allowed.hi[k]); break;
                case SqueezePolicy::uniform: t[k] = allowed.hi[k] > lo ? rng.uniform(lo, allowed.hi[k]) : lo; break;
                case SqueezePolicy::corner: t[k] = corner[k]; break;
            }
        }
    }
    return targets;
}

OpinionTrace opinion_trial(std::size_t n, std::size_t d, double alpha, SqueezePolicy policy,
                           std::size_t steps_cap, double diameter_cutoff, Rng& rng) {
    if (n < 2) throw ParameterError("opinion trial needs n >= 2");
    std::vector<Point> pts(n, Point(d));
    for (auto& p : pts) {
        for (auto& c : p) c = rng.uniform();
    }
    OpinionState state(d, alpha, std::move(pts));
    OpinionTrace trace;
    trace.d = d;
    trace.alpha = alpha;
    trace.n = n;
    trace.initial = state.points;
    while (trace.records.size() < steps_cap && state.spread() >= diameter_cutoff) {
        std::vector<AgentId> subset;
        while (subset.size() < 2) {
            subset.clear();
            for (AgentId i = 0; i < n; ++i) {
                if (rng.bernoulli(0.5)) subset.push_back(i);
            }
        }
        auto result = opinion_step(state, subset, squeeze_targets(state, subset, policy, rng));
        if (!result.report.ok()) throw PolicyError("squeeze policy produced an invalid target: " + result.report.describe());
        trace.records.push_back(std::move(result.record));
        state = std::move(result.next);
    }
    return trace;
}

Trace opinion_axis_trace(const OpinionTrace& trace, std::size_t axis) {
    if (axis >= trace.d) throw ParameterError("axis out of range");
    Trace out;
    out.kind = TraceKind::averaging;
    out.n = trace.n;
    out.params = AveragingParams(0.5 * trace.alpha);
    std::vector<double> pos(trace.n);
    for (AgentId i = 0; i < trace.n; ++i) pos[i] = trace.initial[i][axis];
    for (const auto& rec : trace.records) {
        TraceRecord r;
        r.t = out.records.size();
        r.graph = StepGraph::complete_on(trace.n, rec.subset);
        r.before = Configuration(pos, r.t);
        for (std::size_t m = 0; m < rec.subset.size(); ++m) pos[rec.subset[m]] = rec.after[m][axis];
        r.after = Configuration(pos, r.t + 1);
        out.records.push_back(std::move(r));
    }
    return out;
}

VolumeReport opinion_volume_report(const OpinionTrace& trace, double s, double eps) {
    const double d = static_cast<double>(trace.d);
    if (!(s > 0.0 && s <= 1.0 / d)) throw ParameterError("volume exponent must lie in (0, 1/d]");
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    VolumeReport r;
    r.s = s;
    r.eps = eps;
    const double e = static_cast<double>(trace.n) - 1.0;
    r.bound = std::pow(6.0 / (d * trace.alpha * s), e);
    std::vector<double> axis_sums(trace.d, 0.0);
    for (const auto& rec : trace.records) {
        r.volume_energy += spow(rec.volume, s);
        for (std::size_t k = 0; k < trace.d; ++k) axis_sums[k] += spow(std::max(rec.box.side(k), 0.0), d * s);
        if (rec.volume >= eps) ++r.count;
    }
    r.holder_rhs = 1.0;
    for (double sum : axis_sums) r.holder_rhs *= std::pow(sum, 1.0 / d);
    r.holder_ok = r.volume_energy <= r.holder_rhs * (1.0 + 1e-12) + 1e-300;
    if (eps < 1.0) {
        r.count_s = std::min(static_cast<double>(trace.n) / std::log2(1.0 / eps), 1.0 / d);
        r.count_bound = std::pow(eps, -r.count_s) * std::pow(6.0 / (d * trace.alpha * r.count_s), e);
    }
    return r;
}

double KuramotoState::window_lo() const { return alpha_margin - std::numbers::pi / 2.0; }
double KuramotoState::window_hi() const { return std::numbers::pi / 2.0; }

KuramotoStepResult kuramoto_step(const KuramotoState& state, const StepGraph& g) {
    const std::size_t n = state.thetas.size();
    if (g.size() != n) throw DimensionError("graph size differs from the oscillator count");
    const double c = state.coupling();
    if (!(c > 0.0 && c <= 1.0)) throw ParameterError("K dt must lie in (0, 1]");
    KuramotoStepResult out;
    out.next = state;
    out.record.graph = g;
    out.record.before = state.thetas;
    const auto& th = state.thetas;
    for (AgentId i = 0; i < n; ++i) {
        const auto nb = g.neighbors(i);
        double pull = 0.0;
        for (AgentId j : nb) pull += std::sin(th[j] - th[i]);
        out.next.thetas[i] = th[i] + c / static_cast<double>(nb.size() + 1) * pull;
    }
    out.record.after = out.next.thetas;

    // Realized margin: where each agent landed inside the span of its
    // neighbourhood, as a fraction of that span.
    double rho_eff = 0.5;
    for (AgentId i = 0; i < n; ++i) {
        double lo = th[i];
        double hi = th[i];
        for (AgentId j : g.neighbors(i)) {
            lo = std::min(lo, th[j]);
            hi = std::max(hi, th[j]);
        }
        if (hi > lo) {
            const double y = out.next.thetas[i];
            rho_eff = std::min(rho_eff, std::min(y - lo, hi - y) / (hi - lo));
        }
    }
    out.record.rho_eff = rho_eff;
    for (double t : out.next.thetas) {
        if (!(t >= state.window_lo() && t <= state.window_hi())) out.record.half_circle_ok = false;
    }
    return out;
}

KuramotoTrace kuramoto_trial(std::size_t n, double coupling, double alpha_margin, double edge_prob,
                             std::size_t steps_cap, double diameter_cutoff, Rng& rng) {
    if (n < 2) throw ParameterError("Kuramoto trial needs n >= 2");
    if (!(alpha_margin > 0.0 && alpha_margin < std::numbers::pi)) throw ParameterError("margin must lie in (0, pi)");
    KuramotoTrace trace;
    trace.initial.K = coupling;
    trace.initial.dt = 1.0;
    trace.initial.alpha_margin = alpha_margin;
    trace.initial.thetas.resize(n);
    for (auto& t : trace.initial.thetas) t = rng.uniform(trace.initial.window_lo(), trace.initial.window_hi());
    KuramotoState state = trace.initial;
    auto spread = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    while (trace.records.size() < steps_cap && spread(state.thetas) >= diameter_cutoff) {
        StepGraph g(n);
        for (AgentId a = 0; a < n; ++a) {
            for (AgentId b = a + 1; b < n; ++b) {
                if (rng.bernoulli(edge_prob)) g.add(a, b);
            }
        }
        auto step = kuramoto_step(state, g);
        trace.records.push_back(std::move(step.record));
        state = std::move(step.next);
    }
    return trace;
}

SyncReport kuramoto_sync_report(const KuramotoTrace& trace, double eps) {
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    SyncReport r;
    r.eps = eps;
    const std::size_t n = trace.initial.thetas.size();
    for (const auto& rec : trace.records) {
        bool long_edge = false;
        for (auto [a, b] : rec.graph.pairs()) long_edge = long_edge || std::abs(rec.before[a] - rec.before[b]) >= eps;
        if (long_edge) ++r.count;
        r.rho_eff = std::min(r.rho_eff, rec.rho_eff);
        if (!rec.half_circle_ok) ++r.flagged;
    }
    r.in_regime = n < 64 && eps <= std::ldexp(1.0, -static_cast<int>(n));
    if (n >= 2 && r.rho_eff > 0.0) {
        r.asymptotic = std::pow(std::log(1.0 / eps) / r.rho_eff, static_cast<double>(n - 1));
        const double width = trace.initial.window_hi() - trace.initial.window_lo();
        r.rigorous = bound_comm(n, std::min(r.rho_eff, 0.5), eps / width).bound;
    } else if (n >= 2) {
        r.asymptotic = r.rigorous = std::numeric_limits<double>::infinity();
    }
    return r;
}

}  // namespace senergy
