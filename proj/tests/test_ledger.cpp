#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "oracles.hpp"
#include "senergy/error.hpp"
#include "senergy/ledger.hpp"
#include "senergy/simulate.hpp"

using namespace senergy;

TEST_CASE("initial accounts") {
    const std::vector<double> x{0.0, 1.0};
    Ledger two(x, 1.0, 0.5);
    CHECK(two.A() == 4.0);
    CHECK(two.account(0, 1) == 4.0);
    CHECK(two.injected() == 4.0);

    const std::vector<double> y{0.0, 0.0, 1.0};
    Ledger three(y, 1.0, 0.5);
    CHECK(three.account(0, 1) == 0.0);
    CHECK(three.account(1, 2) == 4.0);
    CHECK(three.account(0, 2) == 16.0);

    const std::vector<double> same{0.3, 0.3, 0.3};
    CHECK(Ledger(same, 0.5, 0.25).injected() == 0.0);
    CHECK_THROWS_AS(Ledger(std::vector<double>{0.5, 0.1}, 1.0, 0.5), ParameterError);
}

TEST_CASE("two-agent forced step") {
    const std::vector<double> x{0.0, 1.0};
    const std::vector<double> y{0.5, 0.5};
    Ledger ledger(x, 1.0, 0.5);
    const auto rec = ledger.clear(x, y, TwistStep(0, 1, 0.5));
    CHECK(rec.balance.get(0, 1) == 4.0);
    CHECK(rec.credit.get(0, 1) == 0.0);
    CHECK(rec.new_balance.get(0, 1) == 0.0);
    CHECK(rec.release.get(0, 1) == 4.0);
    CHECK(rec.energy_due == 1.0);
    CHECK(ledger.spent() == 1.0);
    CHECK(ledger.conserved());
    const auto bc = check_bc_lowerbound(rec, x, TwistStep(0, 1, 0.5), 1.0);
    CHECK(bc.min_slack == 0.0);
}

TEST_CASE("three-agent clearing pass by hand") {
    // x = (0, 0.5, 1), window over all three, rho = 1/4, s = 1, every agent
    // at the left end of its twist interval: y = (0.125, 0.25, 0.25).
    // A = 8. B = {4, 4, 64}, B' = {1, 0, 8}.
    // (0,2): C = 0,  D = 56
    // (0,1): C = 28, D = 31
    // (1,2): C = 28, D = 32
    const std::vector<double> x{0.0, 0.5, 1.0};
    const TwistStep step(0, 2, 0.25);
    const auto y = leftmost_twist_move(x, step);
    REQUIRE(y == std::vector<double>{0.125, 0.25, 0.25});
    Ledger ledger(x, 1.0, 0.25);
    const auto rec = ledger.clear(x, y, step);
    CHECK(rec.A == 8.0);
    CHECK(rec.credit.get(0, 2) == 0.0);
    CHECK(rec.release.get(0, 2) == 56.0);
    CHECK(rec.credit.get(0, 1) == 28.0);
    CHECK(rec.release.get(0, 1) == 31.0);
    CHECK(rec.credit.get(1, 2) == 28.0);
    CHECK(rec.release.get(1, 2) == 32.0);
    CHECK(rec.payment_available == 31.0);
    CHECK(rec.energy_due == 1.0);
    CHECK(rec.discarded == 62.0);
    CHECK(ledger.injected() == 72.0);
    CHECK(ledger.balance_total() == 9.0);
    CHECK(ledger.conservation_gap() == 0.0);

    const auto o = oracle::clear({0.0L, 0.5L, 1.0L}, {0.125L, 0.25L, 0.25L}, 0, 2, 1.0L, 0.25L);
    CHECK(static_cast<double>(o.D[0][1]) == 31.0);
    CHECK(static_cast<double>(o.discarded) == 62.0);
    CHECK(check_bc_lowerbound(rec, x, step, 1.0).min_slack >= 0.0);
}

TEST_CASE("degenerate window pays nothing") {
    const std::vector<double> x{0.2, 0.2, 0.9};
    Ledger ledger(x, 0.5, 0.25);
    const auto rec = ledger.clear(x, x, TwistStep(0, 1, 0.25));
    CHECK(rec.energy_due == 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            CHECK(rec.new_balance.get(i, j) == rec.balance.get(i, j));
            CHECK(rec.release.get(i, j) == rec.credit.get(i, j));
        }
    }
}

TEST_CASE("clearing agrees with the long double oracle on random twist steps") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform();
        std::sort(x.begin(), x.end());
        const Rank u = rng.below(n - 1);
        const Rank v = u + 1 + rng.below(n - 1 - u);
        const double rho = std::array{0.1, 0.25, 0.5}[rng.below(3)];
        const double s = std::array{0.25, 0.5, 1.0}[rng.below(3)];
        const TwistStep step(u, v, rho);
        const auto y = random_twist_move(x, step, rng);

        Ledger ledger(x, s, rho);
        const auto rec = ledger.clear(x, y, step);
        const auto o = oracle::clear(std::vector<long double>(x.begin(), x.end()),
                                     std::vector<long double>(y.begin(), y.end()), u, v, s, rho);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                // D is a difference of terms as large as B + C, so compare relative to those
                const double scale = static_cast<double>(std::max({std::fabs(o.B[i][j]) + std::fabs(o.C[i][j]),
                                                                   std::fabs(o.D[i][j]), 1.0L}));
                const auto ii = static_cast<std::ptrdiff_t>(i);
                const auto jj = static_cast<std::ptrdiff_t>(j);
                CHECK(std::abs(rec.release.get(ii, jj) - static_cast<double>(o.D[i][j])) <= 1e-12 * scale);
                CHECK(rec.release.get(ii, jj) >= -1e-12 * scale);
            }
        }
        CHECK(rec.payment_available >= rec.energy_due - 1e-9 * ledger.A());
        CHECK(ledger.conserved());
        CHECK_NOTHROW(check_bc_lowerbound(rec, x, step, s));
    }
}

TEST_CASE("desync and payment failures are detected") {
    const std::vector<double> x{0.0, 1.0};
    Ledger ledger(x, 1.0, 0.5);
    const std::vector<double> other{0.0, 0.5};
    CHECK_THROWS_AS(ledger.clear(other, other, TwistStep(0, 1, 0.5)), LedgerDesync);

    // Too small a move for rho = 1/2: the pair releases 4 - 3.6 = 0.4 credits,
    // short of the unit energy due.
    Ledger cheat(x, 1.0, 0.5);
    const std::vector<double> small{0.05, 0.95};
    CHECK_THROWS_AS(cheat.clear(x, small, TwistStep(0, 1, 0.5)), PaymentFailure);
}

TEST_CASE("inequality 1 - (1-x)^s >= s x") {
    CHECK(ineq_sx(0.3, 0.0));
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(ineq_sx(1.0, x));
    CHECK(ineq_sx(0.5, 0.75));
    CHECK(1.0 - std::pow(0.25, 0.5) == 0.5);
}

TEST_CASE("injection bound") {
    const auto two = bound_injection(2, 1.0, 0.25);
    CHECK(two.pair_sum == two.A);
    CHECK(two.A == 8.0);
    const auto three = bound_injection(3, 1.0, 0.5);
    CHECK(three.pair_sum == 24.0);
    CHECK(three.closed_majorant == 32.0);
    for (std::size_t n = 3; n <= 8; ++n) {
        const auto b = bound_injection(n, 0.01, 0.1);
        CHECK(b.pair_sum <= b.closed_majorant);
        CHECK(b.pair_sum <= b.geometric_majorant);
        CHECK(b.closed_majorant / b.pair_sum < 2.0 + 1e-9);
    }
}

TEST_CASE("certify a simulated trace") {
    Rng rng(9);
    auto x = random_configuration(5, rng);
    auto trace = simulate(x, AveragingParams(0.25), GraphModel{}, PolicyKind::leftmost, SimulationLimits{500, 1e-10},
                          rng);
    for (double s : {0.25, 0.5, 1.0}) {
        const auto sum = certify(trace, s);
        CHECK(sum.spent <= sum.injected);
        CHECK(std::abs(sum.conservation_gap) <= 1e-9 * sum.injected);
        CHECK(sum.min_payment_margin >= -1e-9);
    }
}
