#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "senergy/trace.hpp"

namespace senergy {

struct EnergyReport {
    std::vector<double> s_values;
    std::vector<double> totals;                     // per s
    std::vector<std::vector<double>> partial_sums;  // per s, running sum after each record
    std::vector<double> eps_values;
    std::vector<std::size_t> comm_counts;  // per eps
    std::optional<std::size_t> truncated_at;
    double diameter_final = 0.0;
};

// Energy released by one record: the interval-union energy of its graph, or
// (x_v - x_u)^s for twist records.
double record_energy(const TraceRecord& record, TraceKind kind, double s);

// Longest embedded edge of a record (window width for twist records).
double record_longest_edge(const TraceRecord& record, TraceKind kind);

// Per-s totals of the step energy over all records, plus communication
// counts for each eps. Throws TraceError when the trace does not replay.
EnergyReport accumulate(const Trace& trace, std::span<const double> s_values,
                        std::span<const double> eps_values = {}, bool validate = true);

// Number of records with an embedded edge of length >= eps.
std::size_t comm_count(const Trace& trace, double eps);

// min{(3 / rho s)^{n-1}, 2 (2 / rho s)^{n-1}} for n > 2, and 2 / (rho s) for
// n = 2. Zero for n < 2.
double bound_theorem1(std::size_t n, double rho, double s);

struct CommBound {
    double bound = 0.0;       // min of the two evaluations
    double s_coarse = 0.0;    // 1 / log2(1/eps), clamped to (0, 1]
    double s_fine = 0.0;      // n / log2(1/eps), clamped to (0, 1]
    double at_coarse = 0.0;   // eps^{-s} E(s) at s_coarse
    double at_fine = 0.0;     // eps^{-s} E(s) at s_fine
    double regime_coarse = 0.0;  // ((1/rho) log2(1/eps))^{n-1}
    double regime_fine = 0.0;    // ((1/(rho n)) log2(1/eps))^{n-1}
};

using EnergyBound = std::function<double(double s)>;

// Upper bound on the communication count from C_eps <= eps^{-s} E(s). When
// energy_bound is empty, E(s) = bound_theorem1(n, rho, s). eps > 1 gives 0.
CommBound bound_comm(std::size_t n, double rho, double eps, const EnergyBound& energy_bound = {});

}  // namespace senergy
