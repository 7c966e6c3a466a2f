#pragma once

// Credit ledger certifying the s-energy bound along a twist trajectory.
//
// Every pair i < j holds B_{i,j} = (x_j - x_i)^s A^{j-i} credits with
// A = 2 / (rho s). At each twist step the pairs are cleared in descending
// order of j - i: pair (i, j) receives C_{i,j} = (D_{i-1,j} + D_{i,j+1}) / 2
// from its two parents, rebalances to B'_{i,j}, and releases
// D_{i,j} = B_{i,j} + C_{i,j} - B'_{i,j}, half to each child. The step's
// energy (x_v - x_u)^s is paid out of D_{u,u+1}. If every D stays
// nonnegative and every payment is covered, the money injected at the start
// bounds the total s-energy.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "senergy/trace.hpp"
#include "senergy/twist.hpp"

namespace senergy {

// Relative tolerance for all ledger checks, scaled by A^{j-i} (donations),
// A (payments) or the injected total (conservation).
inline constexpr double kLedgerRelTolerance = 1e-9;

// Upper-triangular array over pairs 0 <= i < j < n.
class PairTable {
public:
    PairTable() = default;
    explicit PairTable(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    // Out-of-range pairs read as zero.
    double get(std::ptrdiff_t i, std::ptrdiff_t j) const {
        if (i < 0 || j >= static_cast<std::ptrdiff_t>(n_) || i >= j) return 0.0;
        return data_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
    }
    double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double total() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct ClearingRecord {
    Rank u = 0;
    Rank v = 0;
    double A = 0.0;
    PairTable balance;      // B_{i,j} at time t
    PairTable credit;       // C_{i,j}
    PairTable release;      // D_{i,j}
    PairTable new_balance;  // B'_{i,j}
    double payment_available = 0.0;  // D_{u,u+1}
    double energy_due = 0.0;         // (x_v - x_u)^s
    double discarded = 0.0;          // sum of D over adjacent pairs minus the payment
    double min_release_slack = 0.0;  // min over pairs of D_{i,j} / A^{j-i}
};

class Ledger {
public:
    // Throws ParameterError unless 0 < s <= 1 and 0 < rho <= 1/2.
    Ledger(std::span<const double> sorted_positions, double s, double rho);

    std::size_t size() const { return n_; }
    double s() const { return s_; }
    double rho() const { return rho_; }
    double A() const { return A_; }
    // A^k
    double scale(std::size_t k) const { return powers_[k]; }

    double account(Rank i, Rank j) const { return accounts_.get(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j)); }
    double balance_total() const { return accounts_.total(); }
    double injected() const { return injected_; }
    double spent() const { return spent_; }
    double discarded() const { return discarded_; }
    std::size_t steps() const { return steps_; }

    // injected - spent - sum of accounts - discarded
    double conservation_gap() const;
    bool conserved() const;

    // Runs one clearing pass for the twist step x -> y. Throws LedgerDesync
    // when the accounts do not match x, CertificateViolation when a donation
    // goes negative, PaymentFailure when D_{u,u+1} cannot cover the energy.
    ClearingRecord clear(std::span<const double> x, std::span<const double> y, const TwistStep& step);

private:
    std::size_t n_;
    double s_;
    double rho_;
    double A_;
    std::vector<double> powers_;
    PairTable accounts_;
    double injected_ = 0.0;
    double spent_ = 0.0;
    double discarded_ = 0.0;
    std::size_t steps_ = 0;
};

// a^s - b^s without cancellation when a and b are close. delta = a - b must
// be supplied by the caller from a cancellation-free route.
double power_difference(double a, double b, double delta, double s);

struct BoundCheck {
    double min_slack = 0.0;  // min over pairs of (B + C - bound) / A^{j-i}
    Rank worst_i = 0;
    Rank worst_j = 0;
};

// B_{i,j} + C_{i,j} >= (x_{v(j)} - x_{u(i)})^s A^{j-i} for every pair, where
// u(i), v(i) collapse to i outside the window. Throws CertificateViolation
// when a pair misses by more than the relative tolerance.
BoundCheck check_bc_lowerbound(const ClearingRecord& record, std::span<const double> x, const TwistStep& step,
                               double s);

// 1 - (1 - x)^s >= s x, up to 1e-15.
bool ineq_sx(double s, double x);

struct InjectionBound {
    double A = 0.0;
    double pair_sum = 0.0;          // sum_{k=1}^{n-1} (n - k) A^k
    double geometric_majorant = 0.0;  // (A / (A - 1))^2 A^{n-1}
    double closed_majorant = 0.0;     // 2 (2 / (rho s))^{n-1}
};

InjectionBound bound_injection(std::size_t n, double s, double rho);

struct CertificateSummary {
    std::size_t steps = 0;
    double injected = 0.0;
    double spent = 0.0;
    double discarded = 0.0;
    double balance = 0.0;
    double conservation_gap = 0.0;
    double min_release_slack = 0.0;
    double min_payment_margin = 0.0;  // min of (D_{u,u+1} - energy_due) / A
    double min_bc_slack = 0.0;
};

using ClearingObserver = std::function<void(std::size_t t, const ClearingRecord&)>;

// Reduces the trace if needed, validates each twist step, and clears the
// ledger along it, also checking the (B + C) bound and conservation after
// every step. The observer, if set, sees every clearing record. Throws on
// the first failure (ReductionRefused, CertificateViolation, PaymentFailure).
CertificateSummary certify(const Trace& trace, double s, const ClearingObserver& observer = {});

}  // namespace senergy
