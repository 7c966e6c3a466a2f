#include "senergy/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "senergy/error.hpp"

namespace senergy {

double spow(double x, double s) { return x > 0.0 ? std::pow(x, s) : 0.0; }

void require_exponent(double s) {
    if (!(s > 0.0 && s <= 1.0)) {
        throw ParameterError("exponent s must lie in (0, 1], got " + std::to_string(s));
    }
}

DenseMatrix::DenseMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n_ * n_) {
        throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                             " entries, expected " + std::to_string(n_ * n_));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

// ---------------------------------------------------------------------------
// Configuration

Configuration::Configuration(std::vector<double> by_id, std::size_t time)
    : by_id_(std::move(by_id)), labels_(by_id_.size()), time_(time) {
    for (std::size_t id = 0; id < by_id_.size(); ++id) {
        const double p = by_id_[id];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ParameterError("agent " + std::to_string(id) + " position " +
                                 std::to_string(p) + " outside [0, 1]");
        }
    }
    std::iota(labels_.begin(), labels_.end(), AgentId{0});
    std::stable_sort(labels_.begin(), labels_.end(),
                     [this](AgentId a, AgentId b) { return by_id_[a] < by_id_[b]; });
}

std::vector<Rank> Configuration::ranks() const {
    std::vector<Rank> r(labels_.size());
    for (Rank k = 0; k < labels_.size(); ++k) r[labels_[k]] = k;
    return r;
}

std::vector<double> Configuration::sorted() const {
    std::vector<double> out(size());
    for (Rank k = 0; k < size(); ++k) out[k] = (*this)[k];
    return out;
}

// ---------------------------------------------------------------------------
// StepGraph

StepGraph StepGraph::undirected(std::size_t n, std::span<const Arc> edges) {
    StepGraph g(n, false);
    for (auto [a, b] : edges) g.add(a, b);
    return g;
}

StepGraph StepGraph::directed(std::size_t n, std::span<const Arc> arcs) {
    StepGraph g(n, true);
    for (auto [a, b] : arcs) g.add(a, b);
    return g;
}

StepGraph StepGraph::complete(std::size_t n) {
    std::vector<AgentId> all(n);
    std::iota(all.begin(), all.end(), AgentId{0});
    return complete_on(n, all);
}

StepGraph StepGraph::complete_on(std::size_t n, std::span<const AgentId> members) {
    StepGraph g(n, false);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) g.add(members[i], members[j]);
    }
    return g;
}

void StepGraph::add(AgentId a, AgentId b) {
    if (a >= n_ || b >= n_) {
        throw DimensionError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") out of range for n = " + std::to_string(n_));
    }
    if (a == b) return;
    if (!directed_ && a > b) std::swap(a, b);
    const Arc arc{a, b};
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), arc);
    if (it == pairs_.end() || *it != arc) pairs_.insert(it, arc);
}

bool StepGraph::has_arc(AgentId a, AgentId b) const {
    if (a == b) return true;
    if (!directed_ && a > b) std::swap(a, b);
    return std::binary_search(pairs_.begin(), pairs_.end(), Arc{a, b});
}

std::vector<AgentId> StepGraph::neighbors(AgentId a) const {
    std::vector<AgentId> out;
    for (auto [p, q] : pairs_) {
        if (p == a) out.push_back(q);
        else if (!directed_ && q == a) out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parameters and reports

AveragingParams::AveragingParams(double rho_, double tolerance_) : rho(rho_), tolerance(tolerance_) {
    if (!(rho > 0.0 && rho <= 0.5)) {
        throw ParameterError("rho must lie in (0, 1/2], got " + std::to_string(rho));
    }
    if (!(tolerance >= 0.0)) throw ParameterError("tolerance must be nonnegative");
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::lower: return "lower";
        case ViolationKind::upper: return "upper";
        case ViolationKind::order: return "order";
        case ViolationKind::frozen: return "frozen";
    }
    return "?";
}

std::string ValidationReport::describe() const {
    if (ok()) return "ok";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < violations.size(); ++k) {
        const auto& v = violations[k];
        if (k) os << "; ";
        os << "agent " << v.index << " " << to_string(v.kind) << " bound " << v.bound << " value "
           << v.value << " slack " << v.slack;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Averaging-step geometry

std::pair<Rank, Rank> neighbor_extremes(const StepGraph& g, const Configuration& x, Rank i) {
    const auto ranks = x.ranks();
    Rank l = i;
    Rank r = i;
    for (AgentId nb : g.neighbors(x.id_at(i))) {
        l = std::min(l, ranks[nb]);
        r = std::max(r, ranks[nb]);
    }
    return {l, r};
}

namespace {

Interval allowed_from_extremes(double xl, double xr, double rho) {
    const double delta = rho * (xr - xl);
    return {xl + delta, xr - delta};
}

// Same as allowed_interval but reusing a precomputed rank map.
Interval allowed_for(const StepGraph& g, const Configuration& x, const std::vector<Rank>& ranks,
                     AgentId id, double rho) {
    Rank i = ranks[id];
    Rank l = i;
    Rank r = i;
    for (AgentId nb : g.neighbors(id)) {
        l = std::min(l, ranks[nb]);
        r = std::max(r, ranks[nb]);
    }
    return allowed_from_extremes(x[l], x[r], rho);
}

}  // namespace

Interval allowed_interval(const StepGraph& g, const Configuration& x, Rank i, double rho) {
    const auto [l, r] = neighbor_extremes(g, x, i);
    return allowed_from_extremes(x[l], x[r], rho);
}

ValidationReport validate_averaging_step(const Configuration& x, const StepGraph& g,
                                         const Configuration& y, const AveragingParams& p) {
    if (x.size() != y.size() || x.size() != g.size()) {
        throw DimensionError("averaging step with n = " + std::to_string(x.size()) + ", graph n = " +
                             std::to_string(g.size()) + ", next n = " + std::to_string(y.size()));
    }
    ValidationReport report;
    const auto ranks = x.ranks();
    for (AgentId id = 0; id < x.size(); ++id) {
        const Interval band = allowed_for(g, x, ranks, id, p.rho);
        const double yi = y.position_of(id);
        if (yi < band.lo - p.tolerance) {
            report.violations.push_back({ViolationKind::lower, id, band.lo, yi, yi - band.lo});
        }
        if (yi > band.hi + p.tolerance) {
            report.violations.push_back({ViolationKind::upper, id, band.hi, yi, band.hi - yi});
        }
    }
    return report;
}

std::vector<Interval> interval_union(const StepGraph& g, const Configuration& x) {
    if (g.size() != x.size()) throw DimensionError("graph and configuration sizes differ");
    std::vector<Interval> pieces;
    pieces.reserve(x.size() + g.pairs().size());
    for (double p : x.by_id()) pieces.push_back({p, p});
    for (auto [a, b] : g.pairs()) {
        const double pa = x.position_of(a);
        const double pb = x.position_of(b);
        pieces.push_back({std::min(pa, pb), std::max(pa, pb)});
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
    std::vector<Interval> merged;
    for (const auto& piece : pieces) {
        if (!merged.empty() && piece.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, piece.hi);
        } else {
            merged.push_back(piece);
        }
    }
    return merged;
}

double step_energy(std::span<const Interval> intervals, double s) {
    require_exponent(s);
    double total = 0.0;
    for (const auto& iv : intervals) total += spow(iv.length(), s);
    return total;
}

// ---------------------------------------------------------------------------
// Policies

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::midpoint: return "midpoint";
        case PolicyKind::leftmost: return "leftmost";
        case PolicyKind::rightmost: return "rightmost";
        case PolicyKind::uniform_random: return "uniform-random";
        case PolicyKind::matrix: return "matrix";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name) {
    for (auto k : {PolicyKind::midpoint, PolicyKind::leftmost, PolicyKind::rightmost,
                   PolicyKind::uniform_random, PolicyKind::matrix}) {
        if (name == to_string(k)) return k;
    }
    throw ParameterError("unknown policy '" + name + "'");
}

void check_policy_matrix(const DenseMatrix& P, const StepGraph& g, double rho) {
    const std::size_t n = g.size();
    if (P.size() != n) throw PolicyError("policy matrix size does not match the graph");
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = P(i, j);
            if (w < 0.0) throw PolicyError("negative entry in policy matrix");
            const bool support = w > 0.0;
            if (support != g.has_arc(i, j)) {
                throw PolicyError("policy matrix support differs from graph at (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
            }
            if (support && w < rho) {
                throw PolicyError("policy matrix entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") below rho");
            }
            row += w;
        }
        if (std::abs(row - 1.0) > 1e-12) {
            throw PolicyError("policy matrix row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

namespace {

double place_inside(const Interval& band, double value) {
    if (band.lo > band.hi) return band.lo;  // bounds crossed by rounding
    return std::clamp(value, band.lo, band.hi);
}

}  // namespace

Configuration apply_policy(const Configuration& x, const StepGraph& g, const AveragingParams& p,
                           const Policy& policy, Rng& rng) {
    if (g.size() != x.size()) throw DimensionError("graph and configuration sizes differ");
    if (policy.kind == PolicyKind::matrix) check_policy_matrix(policy.matrix, g, p.rho);

    const auto ranks = x.ranks();
    std::vector<double> next(x.size());
    for (AgentId id = 0; id < x.size(); ++id) {
        const Interval band = allowed_for(g, x, ranks, id, p.rho);
        double target = 0.0;
        switch (policy.kind) {
            case PolicyKind::midpoint: {
                // The band is symmetric about (x_l + x_r) / 2.
                target = 0.5 * (band.lo + band.hi);
                break;
            }
            case PolicyKind::leftmost: target = band.lo; break;
            case PolicyKind::rightmost: target = band.hi; break;
            case PolicyKind::uniform_random: target = band.lo + (band.hi - band.lo) * rng.uniform(); break;
            case PolicyKind::matrix: {
                for (AgentId j = 0; j < x.size(); ++j) target += policy.matrix(id, j) * x.position_of(j);
                break;
            }
        }
        next[id] = place_inside(band, target);
    }
    return x.advanced(std::move(next));
}

}  // namespace senergy
