#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "druc/ambiguity.hpp"
#include "test_util.hpp"

using namespace druc;

namespace {
AmbiguitySet make_amb(std::vector<double> probs, double rho) {
    AmbiguitySet a;
    a.nominal.probs = std::move(probs);
    a.nominal.support.resize(a.nominal.probs.size());
    a.rho = rho;
    return a;
}
}  // namespace

TEST_CASE("build_nominal counts cluster sizes") {
    Clustering c;
    c.centroids.resize(2);
    c.counts = {30, 70};
    c.assignments.assign(100, 0);
    auto n = build_nominal(c, 100);
    CHECK(n.probs[0] == doctest::Approx(0.3));
    CHECK(n.probs[1] == doctest::Approx(0.7));

    Clustering single;
    single.centroids.resize(1);
    single.counts = {12};
    CHECK(build_nominal(single, 12).probs[0] == doctest::Approx(1.0));

    Clustering empty;
    empty.centroids.resize(2);
    empty.counts = {5, 0};
    CHECK_THROWS(build_nominal(empty, 5));
}

TEST_CASE("kl_divergence basics") {
    CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    double expect = 0.4 * std::log(0.8) + 0.6 * std::log(1.2);
    CHECK(kl_divergence({0.4, 0.6}, {0.5, 0.5}) == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(0.020136).epsilon(1e-3));
    CHECK_THROWS(kl_divergence({0.5, 0.5}, {1.0, 0.0}));
}

TEST_CASE("kl is nonnegative, zero only at equality") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        auto p = testutil::random_simplex(rng, 4);
        auto q = testutil::random_simplex(rng, 4);
        double d = kl_divergence(p, q);
        CHECK(d >= 0.0);
        CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
        double diff = 0.0;
        for (int i = 0; i < 4; ++i) diff += std::abs(p[i] - q[i]);
        if (diff > 1e-2) CHECK(d > 1e-6);
    }
}

TEST_CASE("chi-square quantile against known values") {
    // Reference quantiles (R qchisq).
    CHECK(chi_square_quantile(1, 0.95) == doctest::Approx(3.841459).epsilon(1e-6));
    CHECK(chi_square_quantile(2, 0.95) == doctest::Approx(5.991465).epsilon(1e-6));
    CHECK(chi_square_quantile(11, 0.98) == doctest::Approx(22.617955).epsilon(1e-5));
    CHECK(chi_square_quantile(10, 0.5) == doctest::Approx(9.341818).epsilon(1e-5));
}

TEST_CASE("asymptotic_rho formula and scaling") {
    CHECK(asymptotic_rho(100, 2, 0.05) == doctest::Approx(3.841459 / 200.0).epsilon(1e-6));
    double r1 = asymptotic_rho(365, 12, 0.02);
    CHECK(r1 == doctest::Approx(chi_square_quantile(11, 0.98) / 730.0));
    // Exact 1/N scaling.
    CHECK(asymptotic_rho(100, 5, 0.1) == doctest::Approx(2.0 * asymptotic_rho(200, 5, 0.1)));
    // Monotone decreasing in N.
    double prev = 1e9;
    for (long N : {10L, 50L, 250L, 1000L}) {
        double r = asymptotic_rho(N, 4, 0.05);
        CHECK(r < prev);
        prev = r;
    }
    CHECK_THROWS(asymptotic_rho(10, 4, 1.5));
}

TEST_CASE("worst case of a constant payoff is the constant") {
    auto amb = make_amb({0.3, 0.7}, 0.5);
    auto w = worst_case_expectation({42.0, 42.0}, amb);
    CHECK(w.value == doctest::Approx(42.0));
}

TEST_CASE("rho = 0 returns the nominal expectation") {
    auto amb = make_amb({0.25, 0.75}, 0.0);
    auto w = worst_case_expectation({10.0, 2.0}, amb);
    CHECK(w.value == doctest::Approx(0.25 * 10 + 0.75 * 2));
    CHECK(w.probs[0] == doctest::Approx(0.25));
}

TEST_CASE("huge rho concentrates on the worst scenario") {
    auto amb = make_amb({0.5, 0.5}, 50.0);
    auto w = worst_case_expectation({0.0, 10.0}, amb);
    CHECK(w.value == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("moderate rho lands strictly between expectation and max") {
    auto amb = make_amb({0.5, 0.5}, 0.1);
    auto w = worst_case_expectation({0.0, 10.0}, amb);
    CHECK(w.value > 5.0 + 1e-6);
    CHECK(w.value < 10.0 - 1e-6);
    double oracle = testutil::kl_worst_case_oracle({0.0, 10.0}, {0.5, 0.5}, 0.1);
    CHECK(w.value == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("dual value matches the tilt-curve oracle on random triples") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> Q(-50.0, 200.0);
    for (int t = 0; t < 120; ++t) {
        int S = 2 + static_cast<int>(rng() % 4);
        std::vector<double> q(S);
        for (auto& v : q) v = Q(rng);
        auto pi = testutil::random_simplex(rng, S);
        double rho = std::pow(10.0, -3.0 + 4.0 * (rng() % 1000) / 1000.0);
        auto amb = make_amb(pi, rho);
        auto w = worst_case_expectation(q, amb);
        double oracle = testutil::kl_worst_case_oracle(q, pi, rho);
        double scale = std::max(1.0, std::abs(oracle));
        CHECK(std::abs(w.value - oracle) / scale < 1e-4);
        // The reported maximizer is feasible and attains the value.
        CHECK(kl_divergence(w.probs, pi) <= rho + 1e-6);
        double attained = 0.0;
        for (int i = 0; i < S; ++i) attained += w.probs[i] * q[i];
        CHECK(std::abs(attained - w.value) / scale < 1e-6);
        // Dual objective at the reported multipliers equals the primal value.
        double nominal = 0.0;
        for (int i = 0; i < S; ++i) nominal += pi[i] * q[i];
        double qmax = *std::max_element(q.begin(), q.end());
        CHECK(w.value >= nominal - 1e-7 * scale);
        CHECK(w.value <= qmax + 1e-7 * scale);
    }
}

TEST_CASE("worst case is nondecreasing in rho") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> Q(0.0, 100.0);
    for (int t = 0; t < 40; ++t) {
        int S = 3;
        std::vector<double> q(S);
        for (auto& v : q) v = Q(rng);
        auto pi = testutil::random_simplex(rng, S);
        double prev = -1e18;
        for (double rho : {0.0, 0.01, 0.05, 0.2, 0.5, 1.0, 3.0, 10.0}) {
            auto w = worst_case_expectation(q, make_amb(pi, rho));
            CHECK(w.value >= prev - 1e-7 * std::max(1.0, std::abs(prev)));
            prev = w.value;
        }
    }
}
