#pragma once

// Two applications instrumented as averaging systems: d-dimensional opinion
// dynamics where a chosen group is squeezed toward the center of its
// bounding box, and discrete-time Kuramoto oscillators.

#include <cstddef>
#include <string>
#include <vector>

#include "senergy/core.hpp"
#include "senergy/trace.hpp"

namespace senergy {

// ---------------------------------------------------------------------------
// Opinion dynamics

using Point = std::vector<double>;

struct Box {
    Point lo;
    Point hi;

    std::size_t dim() const { return lo.size(); }
    double side(std::size_t k) const { return hi[k] - lo[k]; }
    // Zero for a degenerate box.
    double volume() const;
    bool contains(const Point& p, double tol = 0.0) const;
};

struct OpinionState {
    std::size_t d = 1;
    double alpha = 0.5;
    std::vector<Point> points;

    OpinionState() = default;
    // Throws ParameterError unless 0 < alpha <= 1, d >= 1, and every point has
    // d coordinates in [0, 1].
    OpinionState(std::size_t d, double alpha, std::vector<Point> points);

    std::size_t size() const { return points.size(); }
    // Largest per-axis spread of all points.
    double spread() const;
};

// Smallest axis-parallel box enclosing the chosen agents.
Box bounding_box(const OpinionState& state, const std::vector<AgentId>& subset);

// (1 - alpha) B + alpha c, computed per axis as [lo + rho w, hi - rho w]
// with rho = alpha / 2, the same expression the averaging check uses.
Box shrunken_box(const Box& box, double alpha);

struct OpinionRecord {
    std::vector<AgentId> subset;
    std::vector<Point> before;
    std::vector<Point> after;
    Box box;  // bounding box of the chosen agents before the move
    double volume = 0.0;
};

struct OpinionStepResult {
    OpinionState next;
    OpinionRecord record;
    ValidationReport report;  // per-coordinate violations; index = agent * d + axis
};

// Moves the chosen agents to their targets. On any violation the state is
// returned unchanged and the report says why.
OpinionStepResult opinion_step(const OpinionState& state, const std::vector<AgentId>& subset,
                               const std::vector<Point>& targets, double tol = kDefaultTolerance);

enum class SqueezePolicy { center, uniform, corner };

const char* to_string(SqueezePolicy policy);
SqueezePolicy parse_squeeze_policy(const std::string& name);

// Targets for the chosen agents: all at the center, independent uniform
// points of the shrunken box, or all at one random corner of it.
std::vector<Point> squeeze_targets(const OpinionState& state, const std::vector<AgentId>& subset,
                                   SqueezePolicy policy, Rng& rng);

struct OpinionTrace {
    std::size_t d = 1;
    double alpha = 0.5;
    std::size_t n = 0;
    std::vector<Point> initial;
    std::vector<OpinionRecord> records;
};

// Random squeezes on random subsets of size >= 2 from random initial points,
// until the spread drops below diameter_cutoff or steps_cap is reached.
OpinionTrace opinion_trial(std::size_t n, std::size_t d, double alpha, SqueezePolicy policy,
                           std::size_t steps_cap, double diameter_cutoff, Rng& rng);

// The axis-k projection as a 1-d averaging trace: each step uses the
// complete graph on the chosen agents and rho = alpha / 2.
Trace opinion_axis_trace(const OpinionTrace& trace, std::size_t axis);

struct VolumeReport {
    double s = 0.0;
    double volume_energy = 0.0;  // sum_t V_t^s
    double bound = 0.0;          // (6 / (d alpha s))^{n-1}
    double holder_rhs = 0.0;     // prod_k (sum_t side_k^{d s})^{1/d}
    bool holder_ok = true;
    double eps = 0.0;
    std::size_t count = 0;       // steps with V_t >= eps
    double count_s = 0.0;        // min(n / log2(1/eps), 1/d)
    double count_bound = 0.0;    // eps^{-count_s} (6 / (d alpha count_s))^{n-1}

    bool within_bound() const { return volume_energy <= bound; }
};

// Throws ParameterError unless 0 < s <= 1/d and eps > 0.
VolumeReport opinion_volume_report(const OpinionTrace& trace, double s, double eps);

// ---------------------------------------------------------------------------
// Kuramoto oscillators

struct KuramotoState {
    std::vector<double> thetas;  // radians
    double K = 1.0;
    double dt = 0.5;
    double alpha_margin = 0.1;   // phases must stay in [alpha - pi/2, pi/2]

    double coupling() const { return K * dt; }
    double window_lo() const;
    double window_hi() const;
};

struct KuramotoRecord {
    StepGraph graph;
    std::vector<double> before;
    std::vector<double> after;
    double rho_eff = 0.5;         // smallest realized averaging margin this step
    bool half_circle_ok = true;
};

struct KuramotoStepResult {
    KuramotoState next;
    KuramotoRecord record;
};

// theta_i' = theta_i + (K dt / |n_i|) sum_{j in n_i} sin(theta_j - theta_i),
// n_i including i. Throws ParameterError unless K dt is in (0, 1].
KuramotoStepResult kuramoto_step(const KuramotoState& state, const StepGraph& g);

struct KuramotoTrace {
    KuramotoState initial;
    std::vector<KuramotoRecord> records;
};

// Initial phases uniform in the margin window; Erdos-Renyi graphs each step.
KuramotoTrace kuramoto_trial(std::size_t n, double coupling, double alpha_margin, double edge_prob,
                             std::size_t steps_cap, double diameter_cutoff, Rng& rng);

struct SyncReport {
    double eps = 0.0;
    std::size_t count = 0;            // steps with an edge of phase gap >= eps
    double rho_eff = 0.5;             // min over records
    std::size_t flagged = 0;          // records leaving the half-circle window
    double asymptotic = 0.0;          // ((1 / rho_eff) log(1/eps))^{n-1}
    double rigorous = 0.0;            // communication bound at eps / (window width)
    bool in_regime = true;            // eps <= 2^{-n}
};

SyncReport kuramoto_sync_report(const KuramotoTrace& trace, double eps);

}  // namespace senergy
