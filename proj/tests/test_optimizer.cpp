#include "pitchflap/optimizer.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace pitchflap;
using Catch::Approx;

TEST_CASE("optimal delay inside the certified stable interval") {
    const DelayOptimum opt =
        optimal_delay(oracle::paper_point(), oracle::paper_gains(), 0.0852521973, 0.3578869751);

    CHECK(opt.tau_star == Approx(0.2296).margin(5e-3));
    CHECK(opt.abscissa == Approx(-0.4368).margin(5e-3));
    CHECK(opt.tau_star > 0.0852521973);
    CHECK(opt.tau_star < 0.3578869751);
    CHECK(opt.abscissa < 0.0);
    CHECK(opt.unimodal);

    SECTION("two rightmost pairs tie at the optimum") {
        REQUIRE(opt.rightmost_roots.size() >= 2);
        bool low = false, high = false;
        for (const auto& r : opt.rightmost_roots) {
            if (std::abs(r - std::complex<double>(-0.4368, 1.2018)) < 5e-3) low = true;
            if (std::abs(r - std::complex<double>(-0.4368, 1.9596)) < 5e-3) high = true;
        }
        CHECK(low);
        CHECK(high);
    }
}

TEST_CASE("abscissa approaches zero toward the interval endpoints") {
    const RotorParams p = oracle::paper_point();
    const ControlGains g = oracle::paper_gains();
    for (double tau : {0.0852521973 + 1e-3, 0.3578869751 - 1e-3}) {
        const AbscissaSample s = evaluate_abscissa(p, g, tau);
        REQUIRE(s.certified);
        CHECK(s.value < 0.0);
        CHECK(std::abs(s.value) < 1e-2);
    }
}

TEST_CASE("empty interval is rejected") {
    CHECK_THROWS_AS(optimal_delay(oracle::paper_point(), oracle::paper_gains(), 0.3, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimal_delay(oracle::paper_point(), oracle::paper_gains(), 0.4, 0.2),
                    std::invalid_argument);
}

TEST_CASE("gain-surface sweep around the published samples") {
    const SweepGrid grid = sweep_gain_surface(oracle::paper_point(), 0.2296,
                                              6.75e-4, 7e-4, 2, 0.6e-4, 1.03e-4, 2);
    REQUIRE(grid.a_values.size() == 2);
    REQUIRE(grid.b_values.size() == 2);

    // corner (a, b) = (6.75e-4, 0.6e-4): the published baseline
    CHECK(grid.abscissa[0][0] == Approx(-0.4368).margin(5e-3));
    CHECK_FALSE(grid.flagged[0][0]);
    // corner (7e-4, 1.03e-4): strictly better than the baseline
    CHECK(grid.abscissa[1][1] == Approx(-0.4465469).margin(1e-4));
    CHECK(grid.abscissa[1][1] < grid.abscissa[0][0]);

    SECTION("reported minimum is attained on the grid") {
        CHECK(grid.min_value <= grid.abscissa[0][0]);
        CHECK(grid.min_value <= grid.abscissa[1][1]);
    }
    SECTION("cells are reproduced by independent evaluations") {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const AbscissaSample s = evaluate_abscissa(
                    oracle::paper_point(),
                    ControlGains{grid.a_values[i], grid.b_values[j]}, 0.2296);
                CHECK(s.value == Approx(grid.abscissa[i][j]).margin(1e-9));
            }
    }
}

TEST_CASE("zero-gain column still actuates through the rate term") {
    const SweepGrid grid =
        sweep_gain_surface(oracle::paper_point(), 0.2296, 0.0, 0.0, 1, 0.6e-4, 0.6e-4, 1);
    const AbscissaSample direct =
        evaluate_abscissa(oracle::paper_point(), ControlGains{0.0, 0.6e-4}, 0.2296);
    CHECK(grid.abscissa[0][0] == Approx(direct.value).margin(1e-9));
}

TEST_CASE("joint optimization never regresses from its initializer") {
    SECTION("improves on the published baseline") {
        const JointOptimum o =
            optimize_joint(oracle::paper_point(), oracle::paper_gains(), 0.2296, 150);
        CHECK(o.abscissa <= -0.4368 + 5e-3);
        CHECK(o.evaluations <= 150);
    }
    SECTION("escapes the unstable published delay") {
        const JointOptimum o = optimize_joint(oracle::paper_point(), oracle::paper_gains(),
                                              2.0 * std::numbers::pi, 150);
        CHECK(o.abscissa < 0.9927);
    }
    SECTION("rejects an infeasible start") {
        CHECK_THROWS_AS(optimize_joint(oracle::paper_point(), oracle::paper_gains(), 0.0, 50),
                        std::invalid_argument);
    }
}
