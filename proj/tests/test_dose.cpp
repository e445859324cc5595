#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "uqkit/dose.hpp"
#include "uqkit/errors.hpp"

using namespace uqkit;

TEST_CASE("eqd2 fixed point and hand values") {
    DoseGrid grid;
    grid.voxels = {2.0, 4.0, 0.0};
    grid.mask = {true, true, true};
    grid.n_fractions = 1;
    grid.alpha_beta = 3.0;
    const auto out = eqd2_transform(grid);
    REQUIRE(out.size() == 3);
    // 2 Gy in a single fraction is the definitional fixed point.
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-12));
    // (4 + 16/3) / (1 + 2/3) = 5.6
    CHECK(out[1] == doctest::Approx(5.6).epsilon(1e-12));
    CHECK(out[2] == 0.0);
}

TEST_CASE("eqd2 with several fractions uses the per-fraction dose") {
    DoseGrid grid;
    grid.voxels = {60.0};
    grid.mask = {true};
    grid.n_fractions = 30;
    grid.alpha_beta = 3.0;
    // d = 2 Gy per fraction: 30 fractions of 2 Gy are exactly EQD2 60.
    CHECK(eqd2_transform(grid)[0] == doctest::Approx(60.0).epsilon(1e-12));

    grid.n_fractions = 15;
    // d = 4: 15 * (4 + 16/3) / (5/3) = 84
    CHECK(eqd2_transform(grid)[0] == doctest::Approx(84.0).epsilon(1e-12));
}

TEST_CASE("eqd2 is monotone in dose") {
    DoseGrid grid;
    grid.n_fractions = 5;
    grid.alpha_beta = 3.0;
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        grid.voxels = {i * 0.7};
        grid.mask = {true};
        const double v = eqd2_transform(grid)[0];
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("eqd2 parameter validation") {
    DoseGrid grid;
    grid.voxels = {1.0};
    grid.mask = {true};
    grid.n_fractions = 0;
    CHECK_THROWS_AS(eqd2_transform(grid), input_error);
    grid.n_fractions = 1;
    grid.alpha_beta = 0.0;
    CHECK_THROWS_AS(eqd2_transform(grid), input_error);
    grid.alpha_beta = 3.0;
    grid.voxels = {-1.0};
    CHECK_THROWS_AS(eqd2_transform(grid), input_error);
}

TEST_CASE("mean dose over the mask") {
    CHECK(mean_dose({10, 10, 10}, {true, true, true}) == 10.0);
    CHECK(mean_dose({0, 20}, {true, true}) == 10.0);
    CHECK(mean_dose({0, 20, 999}, {true, true, false}) == 10.0);
    CHECK_THROWS_AS(mean_dose({1, 2}, {false, false}), input_error);
}

TEST_CASE("v_x boundary is inclusive") {
    const std::vector<double> voxels{5, 5};
    const std::vector<bool> mask{true, true};
    CHECK(v_x(voxels, mask, 5.0) == 100.0);
    CHECK(v_x({10, 10, 10}, {true, true, true}, 5.0) == 100.0);
    CHECK(v_x({2, 8}, {true, true}, 5.0) == 50.0);
    CHECK_THROWS_AS(v_x({1}, {false}, 1.0), input_error);
    CHECK_THROWS_AS(v_x({1}, {true}, -1.0), input_error);
}

TEST_CASE("v_x is non-increasing in x and v_0 is 100") {
    const std::vector<double> voxels{0, 1, 3, 5, 8, 13, 21};
    const std::vector<bool> mask(voxels.size(), true);
    CHECK(v_x(voxels, mask, 0.0) == 100.0);
    double prev = 101.0;
    for (double x = 0.0; x <= 25.0; x += 0.5) {
        const double v = v_x(voxels, mask, x);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("geud power mean") {
    const std::vector<bool> mask{true, true};
    // a = 1 collapses to the arithmetic mean.
    CHECK(geud({2, 8}, mask, 1.0) == doctest::Approx(mean_dose({2, 8}, mask)).epsilon(1e-12));
    CHECK(geud({2, 8}, mask, 2.0) == doctest::Approx(std::sqrt(34.0)).epsilon(1e-12));
    CHECK(geud({7, 7}, mask, -3.5) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(geud({7, 7}, mask, 4.0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("geud rejects a = 0 and nonpositive doses with negative a") {
    const std::vector<bool> mask{true, true};
    CHECK_THROWS_AS(geud({2, 8}, mask, 0.0), input_error);
    CHECK_THROWS_AS(geud({0, 8}, mask, -1.0), input_error);
    CHECK_THROWS_AS(geud({2, 8}, {false, false}, 1.0), input_error);
}

TEST_CASE("geud lies between min and max masked dose") {
    const std::vector<double> voxels{1, 2, 4, 9, 16};
    const std::vector<bool> mask(voxels.size(), true);
    for (double a : {-2.0, -0.5, 0.5, 1.0, 3.0, 10.0}) {
        const double g = geud(voxels, mask, a);
        CHECK(g >= 1.0);
        CHECK(g <= 16.0);
    }
}
