#include "senergy/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "senergy/error.hpp"
#include "senergy/reduction.hpp"

namespace senergy {

double PairTable::total() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) sum += data_[i * n_ + j];
    }
    return sum;
}

double power_difference(double a, double b, double delta, double s) {
    if (a <= 0.0) return -spow(b, s);
    if (b <= 0.0) return spow(a, s);
    if (std::abs(delta) <= 0.5 * b) return std::pow(b, s) * std::expm1(s * std::log1p(delta / b));
    return std::pow(a, s) - std::pow(b, s);
}

Ledger::Ledger(std::span<const double> x, double s, double rho)
    : n_(x.size()), s_(s), rho_(rho), A_(0.0), accounts_(x.size()) {
    require_exponent(s);
    if (!(rho > 0.0 && rho <= 0.5)) throw ParameterError("rho must lie in (0, 1/2]");
    for (std::size_t i = 1; i < n_; ++i) {
        if (x[i] < x[i - 1]) throw ParameterError("ledger positions must be sorted");
    }
    A_ = 2.0 / (rho * s);
    powers_.resize(std::max<std::size_t>(n_, 1));
    powers_[0] = 1.0;
    for (std::size_t k = 1; k < powers_.size(); ++k) powers_[k] = powers_[k - 1] * A_;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) accounts_.at(i, j) = spow(x[j] - x[i], s_) * powers_[j - i];
    }
    injected_ = accounts_.total();
}

double Ledger::conservation_gap() const { return injected_ - spent_ - accounts_.total() - discarded_; }

bool Ledger::conserved() const { return std::abs(conservation_gap()) <= kLedgerRelTolerance * injected_; }

ClearingRecord Ledger::clear(std::span<const double> x, std::span<const double> y, const TwistStep& step) {
    if (x.size() != n_ || y.size() != n_) throw DimensionError("clearing step size differs from ledger");
    if (step.v >= n_) throw ParameterError("twist window exceeds ledger size");

    ClearingRecord rec;
    rec.u = step.u;
    rec.v = step.v;
    rec.A = A_;
    rec.balance = accounts_;
    rec.credit = PairTable(n_);
    rec.release = PairTable(n_);
    rec.new_balance = PairTable(n_);
    rec.min_release_slack = std::numeric_limits<double>::infinity();

    // Accounts are recomputed from positions; the stored ones must agree.
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double expected = spow(x[j] - x[i], s_) * powers_[j - i];
            if (std::abs(expected - accounts_.get(i, j)) > kLedgerRelTolerance * powers_[j - i]) {
                throw LedgerDesync("account (" + std::to_string(i) + ", " + std::to_string(j) +
                                   ") does not match the configuration being cleared");
            }
        }
    }

    for (std::size_t k = n_ - 1; k >= 1; --k) {
        for (std::size_t i = 0; i + k < n_; ++i) {
            const std::size_t j = i + k;
            const auto ii = static_cast<std::ptrdiff_t>(i);
            const auto jj = static_cast<std::ptrdiff_t>(j);
            const double credit = 0.5 * (rec.release.get(ii - 1, jj) + rec.release.get(ii, jj + 1));
            const double gap_before = x[j] - x[i];
            const double gap_after = y[j] - y[i];
            const double shrink = (x[j] - y[j]) - (x[i] - y[i]);
            const double freed = powers_[k] * power_difference(gap_before, gap_after, shrink, s_);
            const double release = credit + freed;  // B + C - B'

            rec.credit.at(i, j) = credit;
            rec.release.at(i, j) = release;
            rec.new_balance.at(i, j) = spow(gap_after, s_) * powers_[k];
            rec.min_release_slack = std::min(rec.min_release_slack, release / powers_[k]);
            if (release < -kLedgerRelTolerance * powers_[k]) {
                std::ostringstream os;
                os.precision(17);
                os << "negative donation D(" << i << ", " << j << ") = " << release << " at clearing step "
                   << steps_ << " (window [" << step.u << ", " << step.v << "])";
                throw CertificateViolation(os.str());
            }
        }
    }

    rec.payment_available = rec.release.get(static_cast<std::ptrdiff_t>(step.u), static_cast<std::ptrdiff_t>(step.u) + 1);
    rec.energy_due = spow(x[step.v] - x[step.u], s_);
    if (rec.payment_available < rec.energy_due - kLedgerRelTolerance * A_) {
        std::ostringstream os;
        os.precision(17);
        os << "D(" << step.u << ", " << step.u + 1 << ") = " << rec.payment_available << " cannot pay energy "
           << rec.energy_due << " at clearing step " << steps_;
        throw PaymentFailure(os.str());
    }

    double adjacent = 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) adjacent += rec.release.get(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(i) + 1);
    rec.discarded = adjacent - rec.energy_due;

    accounts_ = rec.new_balance;
    spent_ += rec.energy_due;
    discarded_ += rec.discarded;
    ++steps_;
    return rec;
}

BoundCheck check_bc_lowerbound(const ClearingRecord& rec, std::span<const double> x, const TwistStep& step,
                               double s) {
    const std::size_t n = rec.balance.size();
    if (x.size() != n) throw DimensionError("bound check size differs from record");
    BoundCheck out;
    out.min_slack = std::numeric_limits<double>::infinity();
    auto in_window = [&](Rank r) { return step.u <= r && r <= step.v; };
    std::vector<double> powers(n, 1.0);
    for (std::size_t k = 1; k < n; ++k) powers[k] = powers[k - 1] * rec.A;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Rank left = in_window(i) ? step.u : i;
            const Rank right = in_window(j) ? step.v : j;
            const double scale = powers[j - i];
            const double bound = spow(x[right] - x[left], s) * scale;
            const auto ii = static_cast<std::ptrdiff_t>(i);
            const auto jj = static_cast<std::ptrdiff_t>(j);
            const double slack = (rec.balance.get(ii, jj) + rec.credit.get(ii, jj) - bound) / scale;
            if (slack < out.min_slack) {
                out.min_slack = slack;
                out.worst_i = i;
                out.worst_j = j;
            }
        }
    }
    if (n < 2) out.min_slack = 0.0;
    if (out.min_slack < -kLedgerRelTolerance) {
        throw CertificateViolation("B + C lower bound fails at pair (" + std::to_string(out.worst_i) + ", " +
                                   std::to_string(out.worst_j) + ")");
    }
    return out;
}

bool ineq_sx(double s, double x) {
    const double lhs = 1.0 - std::pow(1.0 - x, s);
    return lhs >= s * x - 1e-15;
}

InjectionBound bound_injection(std::size_t n, double s, double rho) {
    if (n < 2) throw ParameterError("injection bound needs n >= 2");
    const double A = 2.0 / (rho * s);
    if (!(A > 1.0) || !std::isfinite(A)) throw ParameterError("injection bound needs A = 2 / (rho s) > 1");
    InjectionBound b;
    b.A = A;
    double power = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        power *= A;
        b.pair_sum += static_cast<double>(n - k) * power;
    }
    const double top = std::pow(A, static_cast<double>(n - 1));
    b.geometric_majorant = (A / (A - 1.0)) * (A / (A - 1.0)) * top;
    b.closed_majorant = 2.0 * std::pow(2.0 / (rho * s), static_cast<double>(n - 1));
    return b;
}

CertificateSummary certify(const Trace& trace, double s, const ClearingObserver& observer) {
    require_exponent(s);
    CertificateSummary summary;
    if (trace.records.empty()) return summary;

    const Trace twist = reduce_trace(trace);
    Ledger ledger(trace.records.front().before.sorted(), s, trace.params.rho);
    summary.injected = ledger.injected();
    summary.min_release_slack = std::numeric_limits<double>::infinity();
    summary.min_payment_margin = std::numeric_limits<double>::infinity();
    summary.min_bc_slack = std::numeric_limits<double>::infinity();

    for (const auto& rec : twist.records) {
        const auto& x = rec.before.by_id();
        const auto& y = rec.after.by_id();
        const TwistStep step(rec.window->u, rec.window->v, trace.params.rho);
        const auto report = validate_twist_step(x, step, y, trace.params.tolerance);
        if (!report.ok()) {
            throw ReductionRefused("twist step " + std::to_string(rec.t) + " invalid: " + report.describe(), report);
        }
        const auto cleared = ledger.clear(x, y, step);
        const auto bc = check_bc_lowerbound(cleared, x, step, s);
        if (!ledger.conserved()) {
            std::ostringstream os;
            os.precision(17);
            os << "money conservation gap " << ledger.conservation_gap() << " after clearing step " << rec.t;
            throw CertificateViolation(os.str());
        }
        summary.min_release_slack = std::min(summary.min_release_slack, cleared.min_release_slack);
        summary.min_payment_margin =
            std::min(summary.min_payment_margin, (cleared.payment_available - cleared.energy_due) / cleared.A);
        summary.min_bc_slack = std::min(summary.min_bc_slack, bc.min_slack);
        if (observer) observer(rec.t, cleared);
    }
    summary.steps = ledger.steps();
    summary.spent = ledger.spent();
    summary.discarded = ledger.discarded();
    summary.balance = ledger.balance_total();
    summary.conservation_gap = ledger.conservation_gap();
    if (summary.steps == 0) {
        summary.min_release_slack = summary.min_payment_margin = summary.min_bc_slack = 0.0;
    }
    return summary;
}

}  // namespace senergy
