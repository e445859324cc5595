#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "uqkit/errors.hpp"
#include "uqkit/features.hpp"

using namespace uqkit;

namespace {

// Builds a row-major matrix from columns of equal length.
FeatureMatrix make_matrix(const std::vector<std::vector<double>>& columns) {
    FeatureMatrix m;
    m.n_rows = columns.front().size();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        m.names.push_back("c" + std::to_string(c));
    }
    m.values.resize(m.n_rows * columns.size());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            m.values[r * columns.size() + c] = columns[c][r];
        }
    }
    return m;
}

} // namespace

TEST_CASE("minmax scaling maps columns onto [0,1]") {
    auto m = make_matrix({{0, 5, 10}, {7, 7, 7}});
    minmax_fit_transform(m);
    CHECK(m.column(0) == std::vector<double>{0.0, 0.5, 1.0});
    // Constant columns collapse to 0, not NaN.
    CHECK(m.column(1) == std::vector<double>{0.0, 0.0, 0.0});
    REQUIRE(m.scale_params.has_value());
    CHECK(m.scale_params->min == std::vector<double>{0.0, 7.0});
    CHECK(m.scale_params->max == std::vector<double>{10.0, 7.0});
}

TEST_CASE("minmax apply clamps held-out values") {
    auto m = make_matrix({{0, 5, 10}});
    minmax_fit_transform(m);
    const auto& params = *m.scale_params;
    CHECK(minmax_apply(params, 0, 12.0) == 1.0);
    CHECK(minmax_apply(params, 0, -3.0) == 0.0);
    CHECK(minmax_apply(params, 0, 2.5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("minmax scaling is idempotent") {
    testutil::TestRng rng(11);
    std::vector<std::vector<double>> cols(3, std::vector<double>(40));
    for (auto& col : cols) {
        for (auto& v : col) v = rng.normal() * 5.0 + 2.0;
    }
    auto m = make_matrix(cols);
    minmax_fit_transform(m);
    auto twice = m;
    minmax_fit_transform(twice);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        CHECK(twice.values[i] == doctest::Approx(m.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("minmax rejects empty or non-finite input") {
    FeatureMatrix empty;
    CHECK_THROWS_AS(minmax_fit_transform(empty), input_error);
    auto m = make_matrix({{1.0, std::nan("")}});
    CHECK_THROWS_AS(minmax_fit_transform(m), input_error);
}

TEST_CASE("average ranks match the brute-force oracle") {
    testutil::TestRng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v(25);
        // Coarse values force plenty of ties.
        for (auto& x : v) x = std::floor(rng.uniform() * 6.0);
        const auto got = average_ranks(v);
        const auto want = oracle::average_ranks(v);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("spearman hand values") {
    const std::vector<double> u{1, 2, 3, 4, 5};
    std::vector<double> v = u;
    CHECK(*spearman_rho(u, v) == doctest::Approx(1.0).epsilon(1e-12));
    std::reverse(v.begin(), v.end());
    CHECK(*spearman_rho(u, v) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_FALSE(spearman_rho(u, {2, 2, 2, 2, 2}).has_value());
    CHECK_THROWS_AS(spearman_rho(u, {1, 2}), input_error);
}

TEST_CASE("spearman with ties matches rank-then-pearson") {
    const std::vector<double> u{1, 2, 2, 3};
    const std::vector<double> v{1, 2, 3, 4};
    const auto got = spearman_rho(u, v);
    const auto want = oracle::spearman(u, v);
    REQUIRE(got.has_value());
    REQUIRE(want.has_value());
    CHECK(*got == doctest::Approx(*want).epsilon(1e-12));

    testutil::TestRng rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> a(30), b(30);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = std::floor(rng.uniform() * 8.0);
            b[i] = a[i] * 0.5 + rng.normal();
        }
        const auto lhs = spearman_rho(a, b);
        const auto rhs = oracle::spearman(a, b);
        REQUIRE(lhs.has_value() == rhs.has_value());
        if (lhs) CHECK(*lhs == doctest::Approx(*rhs).epsilon(1e-10));
    }
}

TEST_CASE("prune keeps independent columns") {
    testutil::TestRng rng(41);
    std::vector<std::vector<double>> cols(4, std::vector<double>(200));
    for (auto& col : cols) {
        for (auto& v : col) v = rng.normal();
    }
    const auto m = make_matrix(cols);
    // Sanity: nothing exceeds the threshold to begin with.
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            CHECK(std::abs(*oracle::spearman(cols[i], cols[j])) <= 0.8);
        }
    }
    const auto result = correlation_prune(m, 0.8);
    CHECK(result.kept == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(result.dropped.empty());
}

TEST_CASE("duplicated column is dropped exactly once at rho 1") {
    testutil::TestRng rng(43);
    std::vector<double> base(100);
    for (auto& v : base) v = rng.normal();
    const auto m = make_matrix({base, base});
    const auto result = correlation_prune(m, 0.8);
    CHECK(result.kept.size() == 1);
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].max_abs_rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("greedy trace drops the column most correlated with the rest") {
    testutil::TestRng rng(47);
    const std::size_t n = 400;
    std::vector<double> c0(n), c1(n), c2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.normal();
        const double e = rng.normal();
        c0[i] = x;
        c1[i] = x + 0.4 * e;
        c2[i] = x - 0.5 * e;   // anticorrelated noise keeps rho(1,2) low
    }
    const double r01 = std::abs(*oracle::spearman(c0, c1));
    const double r02 = std::abs(*oracle::spearman(c0, c2));
    const double r12 = std::abs(*oracle::spearman(c1, c2));
    // The construction must put both pairs with column 0 above the
    // threshold and the remaining pair below it.
    REQUIRE(r01 > 0.8);
    REQUIRE(r02 > 0.8);
    REQUIRE(r12 < 0.8);

    const auto result = correlation_prune(make_matrix({c0, c1, c2}), 0.8);
    CHECK(result.kept == std::vector<std::size_t>{1, 2});
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].column == 0);
    CHECK(result.dropped[0].name == "c0");
    CHECK(result.dropped[0].max_abs_rho ==
          doctest::Approx(std::max(r01, r02)).epsilon(1e-9));
}

TEST_CASE("survivors are pairwise within the threshold") {
    testutil::TestRng rng(53);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 120, d = 7;
        std::vector<double> shared(n);
        for (auto& v : shared) v = rng.normal();
        std::vector<std::vector<double>> cols(d, std::vector<double>(n));
        for (std::size_t c = 0; c < d; ++c) {
            const double mix = rng.uniform();   // correlation strength
            for (std::size_t i = 0; i < n; ++i) {
                cols[c][i] = mix * shared[i] + (1.0 - mix) * rng.normal();
            }
        }
        const auto result = correlation_prune(make_matrix(cols), 0.8);
        CHECK(result.kept.size() + result.dropped.size() == d);
        for (std::size_t a = 0; a < result.kept.size(); ++a) {
            for (std::size_t b = a + 1; b < result.kept.size(); ++b) {
                const auto rho = oracle::spearman(cols[result.kept[a]], cols[result.kept[b]]);
                REQUIRE(rho.has_value());
                CHECK(std::abs(*rho) <= 0.8 + 1e-12);
            }
        }
    }
}

TEST_CASE("single column survives pruning") {
    const auto m = make_matrix({{1, 2, 3}});
    const auto result = correlation_prune(m, 0.8);
    CHECK(result.kept == std::vector<std::size_t>{0});
    CHECK(result.dropped.empty());
}

TEST_CASE("constant columns never trigger a drop") {
    testutil::TestRng rng(59);
    std::vector<double> live(50);
    for (auto& v : live) v = rng.normal();
    const auto m = make_matrix({live, std::vector<double>(50, 3.0)});
    const auto result = correlation_prune(m, 0.8);
    CHECK(result.kept == std::vector<std::size_t>{0, 1});
}
