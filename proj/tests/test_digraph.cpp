#include <doctest.h>

#include "senergy/digraph.hpp"
#include "senergy/error.hpp"
#include "senergy/ledger.hpp"
#include "senergy/measure.hpp"

using namespace senergy;

namespace {

StepGraph arcs(std::size_t n, std::vector<StepGraph::Arc> a) { return StepGraph::directed(n, a); }

}  // namespace

TEST_CASE("cut balance") {
    CHECK(is_cut_balanced(StepGraph::complete(4)));
    CHECK(is_cut_balanced(arcs(3, {{0, 1}, {1, 0}})));
    CHECK_FALSE(is_cut_balanced(arcs(2, {{0, 1}})));
    CHECK(is_cut_balanced(arcs(3, {{0, 1}, {1, 2}, {2, 0}})));
    // two separate strongly connected pieces
    CHECK(is_cut_balanced(arcs(5, {{0, 1}, {1, 0}, {2, 3}, {3, 4}, {4, 2}})));
    CHECK_FALSE(is_cut_balanced(arcs(4, {{0, 1}, {1, 0}, {1, 2}})));
    CHECK(is_cut_balanced(StepGraph(3, true)));
}

TEST_CASE("type symmetry") {
    CHECK(is_type_symmetric(DenseMatrix(2, {0.5, 0.5, 0.5, 0.5})));
    CHECK_FALSE(is_type_symmetric(DenseMatrix(2, {0.5, 0.5, 0.0, 1.0})));
    CHECK(is_type_symmetric(DenseMatrix(3, {0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5})));
}

TEST_CASE("hovering") {
    Configuration x({0.0, 0.5, 1.0});
    CHECK(hovering_check(StepGraph::complete(3), x, 0, 2));
    CHECK_FALSE(hovering_check(arcs(3, {{0, 1}}), x, 0, 1));
    CHECK(hovering_check(arcs(3, {{0, 1}, {1, 0}}), x, 0, 1));
    // a directed cycle over all three crosses every gap both ways
    CHECK(hovering_check(arcs(3, {{0, 1}, {1, 2}, {2, 0}}), x, 0, 2));
    // a cycle on ranks 0 and 2 only still covers both gaps
    CHECK(hovering_check(arcs(3, {{0, 2}, {2, 0}}), x, 0, 2));
    CHECK_FALSE(hovering_check(arcs(3, {{0, 2}, {2, 1}}), x, 0, 2));
}

TEST_CASE("stochastic steps") {
    Configuration x({0.0, 1.0});
    const auto id = StochasticStep::from_matrix(DenseMatrix::identity(2));
    CHECK(id.rho_floor == 0.5);
    CHECK(asym_step(x, id).after.by_id() == x.by_id());

    const auto step = StochasticStep::from_matrix(DenseMatrix(2, {0.75, 0.25, 0.25, 0.75}));
    CHECK(step.rho_floor == 0.25);
    const auto y = asym_step(x, step);
    CHECK(y.after.by_id() == std::vector<double>{0.25, 0.75});
    CHECK(y.cut_balanced);
    CHECK(y.type_symmetric);
    CHECK(validate_averaging_step(x, step.support, y.after, AveragingParams(step.rho_floor, 0.0)).ok());

    // doubly stochastic keeps the mean
    Configuration z({0.1, 0.4, 0.9});
    const auto ds = StochasticStep::from_matrix(DenseMatrix(3, {0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5}));
    const auto w = asym_step(z, ds).after.by_id();
    CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.4));

    CHECK_THROWS_AS(StochasticStep::from_matrix(DenseMatrix(2, {0.5, 0.4, 0.5, 0.5})), PolicyError);
    CHECK_THROWS_AS(StochasticStep::from_matrix(DenseMatrix(2, {0.0, 1.0, 0.5, 0.5})), PolicyError);
    CHECK_THROWS_AS(StochasticStep::from_matrix(DenseMatrix(2, {0.75, 0.25, 0.25, 0.75}), 0.3), PolicyError);

    // one-way support is simulated but flagged
    const auto oneway = StochasticStep::from_matrix(DenseMatrix(2, {0.5, 0.5, 0.0, 1.0}));
    CHECK_FALSE(asym_step(x, oneway).cut_balanced);
}

TEST_CASE("random cut-balanced generators") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        DigraphModel model;
        model.type_symmetric = trial % 2 == 0;
        model.rho_target = trial % 3 == 0 ? 0.2 : 0.1;
        const auto g = random_cut_balanced(n, model, rng);
        CHECK(is_cut_balanced(g));
        for (AgentId a = 0; a < n; ++a) CHECK(g.neighbors(a).size() + 1 <= static_cast<std::size_t>(1.0 / model.rho_target + 1e-9));
    }
}

TEST_CASE("stochastic trajectories validate, obey the bound and certify") {
    Rng rng(41);
    std::size_t hovering_failures = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.below(5);
        DigraphModel model;
        model.type_symmetric = trial % 2 == 0;
        model.rho_target = 0.15;
        const auto run = stochastic_trajectory(random_configuration(n, rng), model, SimulationLimits{3000, 1e-10}, rng);
        CHECK(run.all_cut_balanced);
        CHECK(run.min_rho_floor >= model.rho_target);
        CHECK(check_trace(run.trace).ok);
        const std::vector<double> s{0.5, 1.0};
        const auto report = accumulate(run.trace, s);
        for (std::size_t k = 0; k < s.size(); ++k) CHECK(report.totals[k] <= bound_theorem1(n, run.min_rho_floor, s[k]));
        hovering_failures += run.hovering_failures;
        if (run.hovering_failures == 0) CHECK_NOTHROW(certify(run.trace, 0.5));
    }
    CHECK(hovering_failures == 0);
}
