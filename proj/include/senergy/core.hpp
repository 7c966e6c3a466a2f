#pragma once

// Domain types for symmetric averaging systems on the unit interval: agent
// configurations, per-step communication graphs, the move constraint of an
// averaging step, and the interval-union geometry behind the s-energy.
//
// Ranks and agent ids are 0-based throughout. A rank is a position in the
// sorted order of the current configuration; an agent id is the stable label
// an agent keeps for the whole trajectory.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "senergy/rng.hpp"

namespace senergy {

using AgentId = std::size_t;
using Rank = std::size_t;

inline constexpr double kDefaultTolerance = 1e-9;

// x^s with the convention 0^s = 0 for every s in (0, 1].
double spow(double x, double s);

// Throws ParameterError unless 0 < s <= 1.
void require_exponent(double s);

// Dense row-major square matrix; only used for small n.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    DenseMatrix(std::size_t n, std::vector<double> row_major);

    static DenseMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Positions of n agents in [0, 1], kept together with the sorted order.
// Ties in position are broken by agent id.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::vector<double> by_id, std::size_t time = 0);

    std::size_t size() const { return by_id_.size(); }
    std::size_t time() const { return time_; }

    // Position of the agent at the given rank.
    double operator[](Rank r) const { return by_id_[labels_[r]]; }
    AgentId id_at(Rank r) const { return labels_[r]; }
    double position_of(AgentId id) const { return by_id_[id]; }

    const std::vector<double>& by_id() const { return by_id_; }
    // rank -> agent id
    const std::vector<AgentId>& labels() const { return labels_; }
    // agent id -> rank
    std::vector<Rank> ranks() const;
    std::vector<double> sorted() const;

    double min() const { return by_id_.empty() ? 0.0 : (*this)[0]; }
    double max() const { return by_id_.empty() ? 0.0 : (*this)[size() - 1]; }
    double diameter() const { return max() - min(); }

    // Same agents moved to new positions, one step later.
    Configuration advanced(std::vector<double> by_id) const {
        return Configuration(std::move(by_id), time_ + 1);
    }

    // Equal positions per agent id; time is ignored.
    bool same_positions(const Configuration& other) const { return by_id_ == other.by_id_; }

private:
    std::vector<double> by_id_;
    std::vector<AgentId> labels_;
    std::size_t time_ = 0;
};

// One step's communication graph over agent ids. Self-loops are implicit.
// Undirected graphs store each edge once with a < b; directed graphs store
// arcs (a, b) meaning "a listens to b".
class StepGraph {
public:
    using Arc = std::pair<AgentId, AgentId>;

    StepGraph() = default;
    explicit StepGraph(std::size_t n, bool directed = false) : n_(n), directed_(directed) {}

    static StepGraph undirected(std::size_t n, std::span<const Arc> edges);
    static StepGraph directed(std::size_t n, std::span<const Arc> arcs);
    static StepGraph complete(std::size_t n);
    static StepGraph complete_on(std::size_t n, std::span<const AgentId> members);

    // Adds an edge (undirected) or arc (directed). Self-loops are ignored.
    void add(AgentId a, AgentId b);

    std::size_t size() const { return n_; }
    bool is_directed() const { return directed_; }
    bool has_arc(AgentId a, AgentId b) const;
    // Stored pairs: edges with a < b, or arcs with a != b. Sorted, unique.
    const std::vector<Arc>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }
    // Out-neighbours of a (excluding a itself).
    std::vector<AgentId> neighbors(AgentId a) const;

    bool operator==(const StepGraph&) const = default;

private:
    void normalize();

    std::size_t n_ = 0;
    bool directed_ = false;
    std::vector<Arc> pairs_;
};

struct AveragingParams {
    double rho = 0.5;
    double tolerance = kDefaultTolerance;

    AveragingParams() = default;
    // Throws ParameterError unless 0 < rho <= 1/2 and tolerance >= 0.
    explicit AveragingParams(double rho, double tolerance = kDefaultTolerance);
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool degenerate() const { return hi <= lo; }
    bool contains(double p) const { return lo <= p && p <= hi; }
    bool operator==(const Interval&) const = default;
};

enum class ViolationKind { lower, upper, order, frozen };

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::size_t index;  // agent id for averaging steps, rank for twist steps
    double bound;
    double value;
    double slack;  // negative: amount by which the constraint is missed
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

// l(i), r(i): smallest and largest rank adjacent to rank i (i included).
std::pair<Rank, Rank> neighbor_extremes(const StepGraph& g, const Configuration& x, Rank i);

// Admissible interval [x_l + delta, x_r - delta] for the agent at rank i.
Interval allowed_interval(const StepGraph& g, const Configuration& x, Rank i, double rho);

// Checks every agent's move against x_l + delta <= y <= x_r - delta with the
// params' tolerance. y is compared by agent id. Throws DimensionError when
// sizes disagree.
ValidationReport validate_averaging_step(const Configuration& x, const StepGraph& g,
                                         const Configuration& y, const AveragingParams& p);

// Maximal connected components of the union of embedded edges (self-loops
// embed as points), sorted left to right.
std::vector<Interval> interval_union(const StepGraph& g, const Configuration& x);

// Sum of (b - a)^s over the intervals, with 0^s = 0.
double step_energy(std::span<const Interval> intervals, double s);

enum class PolicyKind { midpoint, leftmost, rightmost, uniform_random, matrix };

const char* to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

// Resolves the nondeterminism of an averaging step.
struct Policy {
    PolicyKind kind = PolicyKind::midpoint;
    DenseMatrix matrix;  // indexed by agent id; used by PolicyKind::matrix only

    static Policy midpoint() { return {PolicyKind::midpoint, {}}; }
    static Policy leftmost() { return {PolicyKind::leftmost, {}}; }
    static Policy rightmost() { return {PolicyKind::rightmost, {}}; }
    static Policy uniform_random() { return {PolicyKind::uniform_random, {}}; }
    static Policy stochastic(DenseMatrix P) { return {PolicyKind::matrix, std::move(P)}; }
};

// Throws PolicyError unless P is row-stochastic, has a positive diagonal,
// its off-diagonal support equals the out-arcs of g, and all positive
// entries are >= rho.
void check_policy_matrix(const DenseMatrix& P, const StepGraph& g, double rho);

// Moves every agent inside its admissible interval according to the policy.
// The result passes validate_averaging_step with zero tolerance (up to the
// rounding of the bounds themselves).
Configuration apply_policy(const Configuration& x, const StepGraph& g, const AveragingParams& p,
                           const Policy& policy, Rng& rng);

}  // namespace senergy
