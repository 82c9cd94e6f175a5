#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memwave/error.hpp"
#include "memwave/gaps.hpp"

using namespace memwave;

TEST_CASE("nearest partner rounds ties to even") {
    CHECK(nearest_partner(1, 3.0) == 2);
    CHECK(nearest_partner(7, 3.0) == 14);
    // c = 5 gives 1.5 m.
    CHECK(nearest_partner(1, 5.0) == 2);
    CHECK(nearest_partner(3, 5.0) == 4);
    CHECK(nearest_partner(5, 5.0) == 8);
    // c = 0.5 gives 3 m; the sign of c does not matter.
    CHECK(nearest_partner(4, 0.5) == 12);
    CHECK(nearest_partner(4, -0.5) == 12);
    CHECK_THROWS_AS(nearest_partner(0, 2.0), InvalidParameter);
    CHECK_THROWS_AS(nearest_partner(1, 1.0), InvalidParameter);
}

TEST_CASE("ladder threshold is the first crossing of the excess") {
    for (double eps : {0.1, 0.01, 0.003}) {
        const auto t = ladder_threshold(1.0, eps, 10000);
        REQUIRE(t);
        const auto excess = [](int n) {
            const EigenTriple e = solve_cubic_spectrum(n, 1.0);
            return e.mu2.imag() - n;
        };
        CHECK(excess(*t) <= eps);
        if (*t > 1) CHECK(excess(*t - 1) > eps);
        // Excess ~ 3 M^2 / (8 n).
        CHECK(double(*t) == doctest::Approx(3.0 / (8.0 * eps)).epsilon(0.1));
    }
    CHECK_FALSE(ladder_threshold(1.0, 1e-6, 100));
}

TEST_CASE("gap bounds and ladders hold for supersonic and subsonic velocity") {
    for (double c : {2.0, 0.5, -2.0, 3.0}) {
        for (double M : {1.0, -2.0}) {
            const ModelParams p{M, c};
            const GapReport r = gap_report(p, 200);
            CHECK(r.branch1_bounds_hold());
            CHECK(r.ladders_hold());
            CHECK(r.gamma_fit > 0.0);
            CHECK(r.coincidences.empty());
            CHECK(r.min_gap_all > 0.0);
            for (const auto& l : r.ladders) CHECK_MESSAGE(l.passed, l.name);
        }
    }
}

TEST_CASE("close pairs follow the analytic distance") {
    const double c = 2.0;
    const GapReport r = gap_report({1.0, c}, 200);
    REQUIRE(!r.close_pairs.empty());
    for (const ClosePair& cp : r.close_pairs) {
        const EigenTriple a = solve_cubic_spectrum(cp.m, 1.0), b = solve_cubic_spectrum(cp.partner, 1.0);
        const cplx l2 = cplx(0.0, c * cp.m) + a.mu2;
        const cplx l3 = cplx(0.0, c * cp.partner) + b.mu3;
        CHECK(cp.distance == doctest::Approx(std::abs(l2 - l3)).epsilon(1e-10));
        CHECK(cp.scaled >= r.gamma_fit);
        CHECK(cp.distance >= cp.bound);
    }
}

TEST_CASE("resonant velocity yields exactly one coincidence") {
    const double v = resonance_velocity(1, 1.0);
    const GapReport r = gap_report({1.0, v}, 200);
    REQUIRE(r.coincidences.size() == 1);
    CHECK(std::abs(r.coincidences[0].n1) == 1);
    CHECK(std::abs(r.coincidences[0].n2) == 1);
    CHECK(r.coincidences[0].distance < 1e-10);
}

TEST_CASE("epsilon is widened with a warning when the threshold exceeds N") {
    const GapReport r = gap_report({1.0, 2.0}, 20, 1e-4);
    CHECK(r.epsilon_used > r.epsilon_requested);
    CHECK(r.N_epsilon == 20);
    CHECK(r.warnings.size() == 1);
    CHECK(r.ladders_hold());
    CHECK_THROWS_AS(gap_report({1.0, 2.0}, 20, -1.0), InvalidParameter);
    CHECK_THROWS_AS(gap_report({0.0, 2.0}, 20), InvalidParameter);
}
