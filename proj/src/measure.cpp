#include "senergy/measure.hpp"

#include <algorithm>
#include <cmath>

#include "senergy/error.hpp"

namespace senergy {

double record_energy(const TraceRecord& record, TraceKind kind, double s) {
    if (kind == TraceKind::twist) {
        require_exponent(s);
        return spow(record.before[record.window->v] - record.before[record.window->u], s);
    }
    const auto intervals = interval_union(record.graph, record.before);
    return step_energy(intervals, s);
}

double record_longest_edge(const TraceRecord& record, TraceKind kind) {
    if (kind == TraceKind::twist) {
        return record.before[record.window->v] - record.before[record.window->u];
    }
    double longest = 0.0;
    for (auto [a, b] : record.graph.pairs()) {
        longest = std::max(longest, std::abs(record.before.position_of(a) - record.before.position_of(b)));
    }
    return longest;
}

EnergyReport accumulate(const Trace& trace, std::span<const double> s_values, std::span<const double> eps_values,
                        bool validate) {
    for (double s : s_values) require_exponent(s);
    for (double eps : eps_values) {
        if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    }
    if (validate) {
        const auto check = check_trace(trace);
        if (!check.ok) {
            throw TraceError("refusing to measure an invalid trace (record " + std::to_string(*check.record) +
                             "): " + check.message);
        }
    }

    EnergyReport report;
    report.s_values.assign(s_values.begin(), s_values.end());
    report.eps_values.assign(eps_values.begin(), eps_values.end());
    report.totals.assign(s_values.size(), 0.0);
    report.partial_sums.assign(s_values.size(), {});
    report.comm_counts.assign(eps_values.size(), 0);
    for (auto& series : report.partial_sums) series.reserve(trace.records.size());

    for (const auto& rec : trace.records) {
        for (std::size_t k = 0; k < s_values.size(); ++k) {
            report.totals[k] += record_energy(rec, trace.kind, s_values[k]);
            report.partial_sums[k].push_back(report.totals[k]);
        }
        if (!eps_values.empty()) {
            const double longest = record_longest_edge(rec, trace.kind);
            for (std::size_t k = 0; k < eps_values.size(); ++k) {
                if (longest >= eps_values[k]) ++report.comm_counts[k];
            }
        }
    }
    if (trace.truncation) report.truncated_at = trace.truncation->at;
    if (!trace.records.empty()) report.diameter_final = trace.records.back().after.diameter();
    return report;
}

std::size_t comm_count(const Trace& trace, double eps) {
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    std::size_t count = 0;
    for (const auto& rec : trace.records) {
        if (record_longest_edge(rec, trace.kind) >= eps) ++count;
    }
    return count;
}

double bound_theorem1(std::size_t n, double rho, double s) {
    require_exponent(s);
    if (!(rho > 0.0 && rho <= 0.5)) throw ParameterError("rho must lie in (0, 1/2]");
    if (n < 2) return 0.0;
    const double e = static_cast<double>(n - 1);
    const double headline = std::pow(3.0 / (rho * s), e);
    const double sharper = n > 2 ? 2.0 * std::pow(2.0 / (rho * s), e) : 2.0 / (rho * s);
    return std::min(headline, sharper);
}

CommBound bound_comm(std::size_t n, double rho, double eps, const EnergyBound& energy_bound) {
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    CommBound out;
    if (eps > 1.0 || n < 2) return out;
    auto energy = [&](double s) { return energy_bound ? energy_bound(s) : bound_theorem1(n, rho, s); };
    const double log_inv = std::log2(1.0 / eps);
    auto clamp_s = [](double s) { return std::isfinite(s) ? std::min(s, 1.0) : 1.0; };
    out.s_coarse = clamp_s(1.0 / log_inv);
    out.s_fine = clamp_s(static_cast<double>(n) / log_inv);
    out.at_coarse = std::pow(eps, -out.s_coarse) * energy(out.s_coarse);
    out.at_fine = std::pow(eps, -out.s_fine) * energy(out.s_fine);
    out.bound = std::min(out.at_coarse, out.at_fine);
    const double e = static_cast<double>(n - 1);
    out.regime_coarse = std::pow(log_inv / rho, e);
    out.regime_fine = std::pow(log_inv / (rho * static_cast<double>(n)), e);
    return out;
}

}  // namespace senergy
