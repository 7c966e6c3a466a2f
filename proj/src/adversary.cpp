#include "senergy/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "senergy/error.hpp"
#include "senergy/measure.hpp"

namespace senergy {

namespace {

class Construction {
public:
    Construction(std::size_t n, double rho, double eps) : rho_(rho), eps_(eps), pos_(n, 0.0) {
        pos_[n - 1] = 1.0;
        run_.trace.kind = TraceKind::averaging;
        run_.trace.n = n;
        run_.trace.params = AveragingParams(rho, 0.0);
    }

    LowerBoundRun finish() {
        run_.trace.truncation =
            Truncation{run_.trace.records.size(), run_.precision_exhausted ? "precision" : "epsilon"};
        return std::move(run_);
    }

    // Group = agents 0..m-1; agents 0..m-2 share one position, agent m-1
    // sits to their right.
    void run(std::size_t m) {
        while (!run_.precision_exhausted) {
            const double a = pos_[m - 2];
            const double b = pos_[m - 1];
            if (b - a < eps_) return;
            const double delta = rho_ * (b - a);
            const double na = a + delta;
            const double nb = b - delta;
            if (na == a && nb == b) {
                run_.precision_exhausted = true;
                return;
            }
            std::vector<double> next = pos_;
            next[m - 2] = na;
            next[m - 1] = nb;
            StepGraph g(pos_.size());
            g.add(m - 2, m - 1);
            emit(std::move(g), std::move(next));
            ++run_.edge_steps;

            if (m - 1 >= 2) {
                run(m - 1);
                if (run_.precision_exhausted) return;
                collapse(m - 1);
            }
        }
    }

private:
    // Moves agents 0..m-1 to their mean, clamped into the admissible band of
    // the complete graph on the group.
    void collapse(std::size_t m) {
        const auto [lo_it, hi_it] = std::minmax_element(pos_.begin(), pos_.begin() + static_cast<std::ptrdiff_t>(m));
        const double lo = *lo_it;
        const double hi = *hi_it;
        if (lo == hi) return;
        const double delta = rho_ * (hi - lo);
        const double band_lo = lo + delta;
        const double band_hi = hi - delta;
        if (band_lo > band_hi) {
            run_.precision_exhausted = true;
            return;
        }
        const double mean = std::accumulate(pos_.begin(), pos_.begin() + static_cast<std::ptrdiff_t>(m), 0.0) /
                            static_cast<double>(m);
        const double c = std::clamp(mean, band_lo, band_hi);
        std::vector<double> next = pos_;
        std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(m), c);
        std::vector<AgentId> members(m);
        std::iota(members.begin(), members.end(), AgentId{0});
        emit(StepGraph::complete_on(pos_.size(), members), std::move(next));
        ++run_.collapse_steps;
    }

    void emit(StepGraph g, std::vector<double> next) {
        TraceRecord rec;
        rec.t = run_.trace.records.size();
        rec.graph = std::move(g);
        rec.before = Configuration(pos_, rec.t);
        rec.after = Configuration(next, rec.t + 1);
        run_.trace.records.push_back(std::move(rec));
        pos_ = std::move(next);
    }

    double rho_;
    double eps_;
    std::vector<double> pos_;
    LowerBoundRun run_;
};

void require_lb_rho(double rho) {
    if (!(rho > 0.0 && rho <= 1.0 / 3.0)) throw ParameterError("rho must lie in (0, 1/3]");
}

class RecurrenceB {
public:
    RecurrenceB(double rho, double tie, std::uint64_t budget) : rho_(rho), limit_(1.0 - tie), budget_(budget) {}

    // The self-referential term is unrolled into a loop so the recursion
    // depth is n rather than the length of the eps chain.
    std::uint64_t eval(std::size_t n, double eps) {
        if (n <= 1 || eps > limit_ || overflow) return 0;
        const auto key = std::make_pair(n, eps);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const double q = 1.0 - rho_ * static_cast<double>(n) / static_cast<double>(n - 1);
        std::uint64_t total = 0;
        for (double e = eps; !(e > limit_); e /= q) {
            if (++work_ > budget_) {
                overflow = true;
                return total;
            }
            const std::uint64_t inner = eval(n - 1, e / rho_);
            if (total > std::numeric_limits<std::uint64_t>::max() - 1 - inner) {
                overflow = true;
                return total;
            }
            total += 1 + inner;
            if (q <= 0.0) break;
        }
        memo_.emplace(key, total);
        return total;
    }

    bool overflow = false;

private:
    double rho_;
    double limit_;
    std::uint64_t budget_;
    std::uint64_t work_ = 0;
    std::map<std::pair<std::size_t, double>, std::uint64_t> memo_;
};

double closed_estimate(std::size_t n, double eps, double rho, std::uint64_t* top_k) {
    if (n <= 1) return 0.0;
    const double x = (std::log(eps) / static_cast<double>(n) - std::log(rho)) / (2.0 * std::log1p(-2.0 * rho));
    const auto k = static_cast<std::uint64_t>(std::max(1.0, std::ceil(x)));
    if (top_k) *top_k = k;
    const double kd = static_cast<double>(k);
    if (n == 2) return kd;
    const double shrink = rho * std::pow(1.0 - 2.0 * rho, kd - 1.0);
    return kd + kd * closed_estimate(n - 1, eps / shrink, rho, nullptr);
}

}  // namespace

LowerBoundRun lb_trajectory(std::size_t n, double rho, double eps) {
    if (n < 2) throw ParameterError("lower-bound construction needs n >= 2");
    require_lb_rho(rho);
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    Construction c(n, rho, eps);
    if (eps < 1.0) c.run(n);
    return c.finish();
}

RecurrenceValue lb_recurrence_b(std::size_t n, double eps, double rho, double tie_tolerance, std::uint64_t budget) {
    if (n < 1) throw ParameterError("recurrence needs n >= 1");
    if (!(rho > 0.0 && rho <= 0.5)) throw ParameterError("rho must lie in (0, 1/2]");
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    if (!(tie_tolerance >= 0.0 && tie_tolerance < 1.0)) throw ParameterError("tie tolerance must lie in [0, 1)");
    RecurrenceB rec(rho, tie_tolerance, budget);
    RecurrenceValue out;
    out.count = rec.eval(n, eps);
    out.overflow = rec.overflow;
    return out;
}

ClosedFormB lb_closedform_b(std::size_t n, double eps, double rho) {
    if (n < 2) throw OutOfRegime("closed form needs n >= 2");
    if (!(rho > 0.0 && rho <= 1.0 / 3.0)) throw OutOfRegime("closed form needs 0 < rho <= 1/3");
    if (!(eps > 0.0 && eps <= std::pow(rho, 2.0 * static_cast<double>(n)))) {
        throw OutOfRegime("closed form needs 0 < eps <= rho^(2n)");
    }
    ClosedFormB out;
    out.estimate = closed_estimate(n, eps, rho, &out.k);
    out.side_lhs = rho * std::pow(1.0 - 2.0 * rho, static_cast<double>(out.k) - 1.0);
    out.side_rhs = std::pow(eps, 1.0 / static_cast<double>(n));
    out.side_ok = out.side_lhs >= out.side_rhs;
    out.asymptotic = std::pow(std::log(1.0 / eps) / (rho * static_cast<double>(n)), static_cast<double>(n - 1));
    return out;
}

double lb_recurrence_a(std::size_t n, double s, double rho) {
    if (n < 2) throw ParameterError("recurrence needs n >= 2");
    require_exponent(s);
    require_lb_rho(rho);
    const double denom = -std::expm1(s * std::log1p(-2.0 * rho));  // 1 - (1 - 2 rho)^s
    const double rs = std::pow(rho, s);
    double e = 0.0;
    for (std::size_t k = 2; k <= n; ++k) e = (rs * e + 1.0) / denom;
    return e;
}

SandwichRow lb_sandwich(std::size_t n, double rho, double eps) {
    SandwichRow row;
    row.n = n;
    row.rho = rho;
    row.eps = eps;
    const auto run = lb_trajectory(n, rho, eps);
    row.measured = comm_count(run.trace, eps);
    row.precision_exhausted = run.precision_exhausted;
    const auto lower = lb_recurrence_b(n, eps, rho, 1e-12);
    row.lower = lower.count;
    row.lower_overflow = lower.overflow;
    row.upper = bound_comm(n, rho, eps).bound;
    const double scale = std::pow(std::log(1.0 / eps) / (rho * static_cast<double>(n)), static_cast<double>(n - 1));
    row.fitted_ratio = scale > 0.0 ? static_cast<double>(row.measured) / scale : 0.0;
    return row;
}

}  // namespace senergy
