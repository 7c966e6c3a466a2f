#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "senergy/core.hpp"
#include "senergy/error.hpp"
#include "senergy/simulate.hpp"

using namespace senergy;

namespace {

StepGraph edges(std::size_t n, std::vector<StepGraph::Arc> e) { return StepGraph::undirected(n, e); }

// Positions 0, 0.2, 0.1, 0.3, 0.7, 0.9, 0.5 with edges joining the first
// three pairs; agent 6 has only its self-loop.
Configuration overlap_positions() { return Configuration({0.0, 0.2, 0.1, 0.3, 0.7, 0.9, 0.5}); }
StepGraph overlap_graph() { return edges(7, {{0, 1}, {2, 3}, {4, 5}}); }

}  // namespace

TEST_CASE("configuration keeps ids and breaks ties by id") {
    Configuration x({0.5, 0.1, 0.5, 0.0});
    CHECK(x.labels() == std::vector<AgentId>{3, 1, 0, 2});
    CHECK(x[0] == 0.0);
    CHECK(x.ranks() == std::vector<Rank>{2, 1, 3, 0});
    CHECK(x.diameter() == doctest::Approx(0.5));
    CHECK_THROWS_AS(Configuration({0.2, 1.5}), ParameterError);
    CHECK_THROWS_AS(Configuration({-0.1}), ParameterError);
}

TEST_CASE("step graph normalizes edges and arcs") {
    StepGraph g(3);
    g.add(2, 0);
    g.add(0, 2);
    g.add(1, 1);
    CHECK(g.pairs().size() == 1);
    CHECK(g.has_arc(2, 0));
    CHECK(g.has_arc(1, 1));
    StepGraph d(3, true);
    d.add(2, 0);
    CHECK(d.has_arc(2, 0));
    CHECK_FALSE(d.has_arc(0, 2));
    CHECK(d.neighbors(2) == std::vector<AgentId>{0});
    CHECK(d.neighbors(0).empty());
}

TEST_CASE("neighbor extremes") {
    Configuration x({0.0, 1.0});
    CHECK(neighbor_extremes(StepGraph(2), x, 0) == std::pair<Rank, Rank>{0, 0});
    CHECK(neighbor_extremes(edges(2, {{0, 1}}), x, 0) == std::pair<Rank, Rank>{0, 1});

    Configuration y({0.0, 0.25, 0.5, 1.0});
    auto g = edges(4, {{1, 3}});
    CHECK(neighbor_extremes(g, y, 1) == std::pair<Rank, Rank>{1, 3});
    CHECK(neighbor_extremes(g, y, 2) == std::pair<Rank, Rank>{2, 2});
}

TEST_CASE("averaging step validation") {
    Configuration x({0.0, 1.0});
    auto g = edges(2, {{0, 1}});
    AveragingParams p(0.5, 0.0);
    CHECK(validate_averaging_step(x, g, Configuration({0.5, 0.5}), p).ok());

    auto bad = validate_averaging_step(x, g, Configuration({0.4, 0.6}), p);
    REQUIRE(bad.violations.size() == 2);
    CHECK(bad.violations[0].index == 0);
    CHECK(bad.violations[0].kind == ViolationKind::lower);
    CHECK(bad.violations[0].bound == 0.5);
    CHECK(bad.violations[1].kind == ViolationKind::upper);

    auto frozen = validate_averaging_step(x, StepGraph(2), Configuration({0.1, 1.0}), p);
    REQUIRE(frozen.violations.size() == 1);
    CHECK(frozen.violations[0].index == 0);

    CHECK_THROWS_AS(validate_averaging_step(x, g, Configuration({0.5}), p), DimensionError);
    CHECK_THROWS_AS(AveragingParams(0.6), ParameterError);
    CHECK_THROWS_AS(AveragingParams(0.0), ParameterError);
}

TEST_CASE("interval union of overlapping and isolated pieces") {
    const auto iv = interval_union(overlap_graph(), overlap_positions());
    REQUIRE(iv.size() == 3);
    CHECK(iv[0] == Interval{0.0, 0.3});
    CHECK(iv[1] == Interval{0.5, 0.5});
    CHECK(iv[2] == Interval{0.7, 0.9});
    CHECK(std::abs(step_energy(iv, 1.0) - 0.5) <= 1e-15);
    CHECK(step_energy(iv, 0.5) == doctest::Approx(std::sqrt(0.3) + std::sqrt(0.2)).epsilon(1e-14));
    CHECK(step_energy(iv, 0.5) == doctest::Approx(0.994936).epsilon(1e-6));
}

TEST_CASE("interval union edge cases") {
    Configuration x({0.2, 0.2, 0.7});
    const auto points = interval_union(StepGraph(3), x);
    REQUIRE(points.size() == 2);
    CHECK(points[0].degenerate());
    CHECK(step_energy(points, 0.5) == 0.0);

    const auto single = interval_union(edges(2, {{0, 1}}), Configuration({0.4, 0.6}));
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Interval{0.4, 0.6});

    // touching segments merge
    const auto touch = interval_union(edges(3, {{0, 1}, {1, 2}}), Configuration({0.0, 0.5, 1.0}));
    CHECK(touch.size() == 1);
}

TEST_CASE("interval union agrees with the pairwise-merge oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        auto x = random_configuration(n, rng);
        auto g = random_graph(x, GraphModel{GraphModelKind::erdos_renyi, 0.25}, rng);
        std::vector<oracle::Seg> segs;
        for (AgentId i = 0; i < n; ++i) segs.push_back({x.position_of(i), x.position_of(i)});
        for (auto [a, b] : g.pairs()) {
            segs.push_back(std::minmax<long double>(x.position_of(a), x.position_of(b)));
        }
        const auto expected = oracle::segment_union(segs);
        const auto got = interval_union(g, x);
        REQUIRE(got.size() == expected.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].lo == static_cast<double>(expected[k].first));
            CHECK(got[k].hi == static_cast<double>(expected[k].second));
        }
        for (double s : {0.25, 0.5, 1.0}) {
            CHECK(step_energy(got, s) == doctest::Approx(static_cast<double>(oracle::energy(expected, s))).epsilon(1e-13));
        }
    }
}

TEST_CASE("policies") {
    Configuration x({0.0, 1.0});
    auto g = edges(2, {{0, 1}});
    Rng rng(1);
    for (double rho : {0.1, 0.25, 0.5}) {
        auto y = apply_policy(x, g, AveragingParams(rho), Policy::midpoint(), rng);
        CHECK(y.by_id() == std::vector<double>{0.5, 0.5});
    }
    auto left = apply_policy(x, g, AveragingParams(0.25), Policy::leftmost(), rng);
    CHECK(left.by_id() == std::vector<double>{0.25, 0.25});

    DenseMatrix P(2, {0.75, 0.25, 0.25, 0.75});
    CHECK_NOTHROW(check_policy_matrix(P, g, 0.25));
    auto y = apply_policy(x, g, AveragingParams(0.25), Policy::stochastic(P), rng);
    CHECK(y.by_id() == std::vector<double>{0.25, 0.75});
    CHECK(validate_averaging_step(x, g, y, AveragingParams(0.25, 0.0)).ok());
    CHECK_THROWS_AS(check_policy_matrix(P, g, 0.3), PolicyError);
    CHECK_THROWS_AS(check_policy_matrix(DenseMatrix(2, {0.5, 0.5, 0.0, 1.0}), g, 0.25), PolicyError);

    CHECK(parse_policy("uniform-random") == PolicyKind::uniform_random);
    CHECK_THROWS_AS(parse_policy("bogus"), ParameterError);
}

TEST_CASE("every built-in policy produces valid steps") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        const double rho = std::array{0.1, 0.25, 0.5}[rng.below(3)];
        auto x = random_configuration(n, rng);
        for (auto kind : {PolicyKind::midpoint, PolicyKind::leftmost, PolicyKind::rightmost,
                          PolicyKind::uniform_random}) {
            auto g = random_graph(x, GraphModel{}, rng);
            auto y = apply_policy(x, g, AveragingParams(rho), Policy{kind, {}}, rng);
            CHECK(validate_averaging_step(x, g, y, AveragingParams(rho, 0.0)).ok());
        }
    }
}

TEST_CASE("spow and exponent range") {
    CHECK(spow(0.0, 0.3) == 0.0);
    CHECK(spow(0.25, 0.5) == 0.5);
    CHECK_THROWS_AS(require_exponent(0.0), ParameterError);
    CHECK_THROWS_AS(require_exponent(1.5), ParameterError);
}
