#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "rass/market.hpp"
#include "rass/rng.hpp"

using namespace rass;

namespace {

ErrorPool zero_pool(int num_obs, int horizon) {
    ErrorPool pool;
    pool.num_obs = num_obs;
    pool.horizon = horizon;
    pool.data.assign(static_cast<std::size_t>(num_obs) * horizon, 0.0);
    return pool;
}

double column_stddev(const ErrorPool& pool, int col) {
    double mean = 0.0;
    for (int r = 0; r < pool.num_obs; ++r)
        mean += pool.at(r, col);
    mean /= pool.num_obs;
    double var = 0.0;
    for (int r = 0; r < pool.num_obs; ++r) {
        const double d = pool.at(r, col) - mean;
        var += d * d;
    }
    return std::sqrt(var / (pool.num_obs - 1));
}

} // namespace

TEST_CASE("time grid validates and converts to hours") {
    CHECK(TimeGrid(30, 48).hour_factor() == 0.5);
    CHECK(TimeGrid(60, 2).hour_factor() == 1.0);
    CHECK(TimeGrid(15, 4).hour_factor() == 0.25);
    CHECK_THROWS_AS(TimeGrid(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(30, 0), std::invalid_argument);
}

TEST_CASE("zero-error pool reproduces the pre-dispatch vector") {
    const PriceVector pd{{10.0, 20.0, 30.0}};
    const ScenarioSet set = build_scenarios(pd, zero_pool(5, 3), 3, 99);
    CHECK(set.count() == 3);
    for (int w = 0; w < set.count(); ++w) {
        CHECK(set.probabilities[w] == 1.0 / 3.0);
        for (int k = 0; k < 3; ++k)
            CHECK(set.price(w, k) == pd[k]);
    }
}

TEST_CASE("paper-sized draw: 100 of 11680 observations at K=48") {
    const ErrorPool pool = synth_pool(48, 11680, 5.0, 0.5, 7);
    PriceVector pd;
    pd.values.assign(48, 40.0);
    const ScenarioSet set = build_scenarios(pd, pool, 100, 42);
    CHECK(set.count() == 100);
    CHECK(set.num_intervals == 48);
    for (double p : set.probabilities)
        CHECK(p == 0.01);
    set.validate();
}

TEST_CASE("three-row pool enumerates exactly once each") {
    const PriceVector pd{{10.0, 20.0}};
    ErrorPool pool;
    pool.num_obs = 3;
    pool.horizon = 2;
    pool.data = {1.0, -1.0, 0.0, 0.0, -2.0, 2.0};
    const ScenarioSet set = build_scenarios(pd, pool, 3, 5);
    REQUIRE(set.count() == 3);
    std::vector<std::vector<double>> rows;
    for (int w = 0; w < 3; ++w) {
        rows.push_back({set.price(w, 0), set.price(w, 1)});
        CHECK(set.probabilities[w] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    std::sort(rows.begin(), rows.end());
    CHECK(rows[0] == std::vector<double>{8.0, 22.0});
    CHECK(rows[1] == std::vector<double>{10.0, 20.0});
    CHECK(rows[2] == std::vector<double>{11.0, 19.0});
}

TEST_CASE("sampling errors") {
    const PriceVector pd{{10.0, 20.0}};
    CHECK_THROWS_AS(build_scenarios(pd, zero_pool(3, 2), 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_scenarios(pd, zero_pool(3, 1), 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_scenarios(pd, zero_pool(3, 2), 0, 0), std::invalid_argument);
}

TEST_CASE("sampling is deterministic under a seed") {
    const ErrorPool pool = synth_pool(6, 200, 2.0, 1.0, 3);
    PriceVector pd;
    pd.values.assign(6, 25.0);
    const ScenarioSet a = build_scenarios(pd, pool, 50, 1234);
    const ScenarioSet b = build_scenarios(pd, pool, 50, 1234);
    CHECK(a.prices == b.prices);
    CHECK(a.probabilities == b.probabilities);
    const ScenarioSet c = build_scenarios(pd, pool, 50, 1235);
    CHECK(a.prices != c.prices);
}

TEST_CASE("window view re-anchors look-ahead distances") {
    const PriceVector pd{{10.0, 20.0, 30.0}};
    ErrorPool pool;
    pool.num_obs = 2;
    pool.horizon = 3;
    pool.data = {1.0, 2.0, 3.0, -1.0, -2.0, -3.0};
    const ScenarioSet full = build_scenarios(pd, pool, 2, 11);

    SUBCASE("start 1 is the identity") {
        const ScenarioSet w1 = window_view(full, pd, 1);
        CHECK(w1.prices == full.prices);
        CHECK(w1.probabilities == full.probabilities);
    }
    SUBCASE("final window uses the shortest look-ahead") {
        const ScenarioSet wk = window_view(full, pd, 3);
        CHECK(wk.num_intervals == 1);
        std::vector<double> got{wk.price(0, 0), wk.price(1, 0)};
        std::sort(got.begin(), got.end());
        // 30 + (+1) and 30 + (-1): look-ahead distance 1 applied to interval 3
        CHECK(got == std::vector<double>{29.0, 31.0});
    }
    SUBCASE("window views compose") {
        const ScenarioSet inner = window_view(full, pd, 2);
        PriceVector suffix{{20.0, 30.0}};
        const ScenarioSet composed = window_view(inner, suffix, 2);
        const ScenarioSet direct = window_view(full, pd, 3);
        CHECK(composed.prices == direct.prices);
    }
    SUBCASE("out-of-range start") {
        CHECK_THROWS_AS(window_view(full, pd, 0), std::out_of_range);
        CHECK_THROWS_AS(window_view(full, pd, 4), std::out_of_range);
    }
}

TEST_CASE("zero-error windows collapse to the pre-dispatch suffix") {
    const PriceVector pd{{5.0, 6.0, 7.0, 8.0}};
    const ScenarioSet full = build_scenarios(pd, zero_pool(4, 4), 2, 0);
    for (int t = 1; t <= 4; ++t) {
        const ScenarioSet w = window_view(full, pd, t);
        for (int wi = 0; wi < w.count(); ++wi)
            for (int k = 0; k < w.num_intervals; ++k)
                CHECK(w.price(wi, k) == pd[t - 1 + k]);
    }
}

TEST_CASE("synthetic pool properties") {
    SUBCASE("degenerate variance") {
        const ErrorPool pool = synth_pool(5, 20, 0.0, 1.0, 9);
        for (double v : pool.data)
            CHECK(v == 0.0);
    }
    SUBCASE("homoscedastic when gamma is zero") {
        const ErrorPool pool = synth_pool(6, 20000, 3.0, 0.0, 17);
        for (int col : {0, 2, 5})
            CHECK(column_stddev(pool, col) == doctest::Approx(3.0).epsilon(0.03));
    }
    SUBCASE("per-column deviation follows sigma0 * h^gamma") {
        const ErrorPool pool = synth_pool(16, 10000, 5.0, 0.5, 21);
        for (int h : {1, 4, 16})
            CHECK(column_stddev(pool, h - 1) ==
                  doctest::Approx(5.0 * std::sqrt(static_cast<double>(h))).epsilon(0.03));
    }
    SUBCASE("common factor keeps the column marginals") {
        const ErrorPool pool = synth_pool(16, 10000, 5.0, 0.5, 21, 0.6);
        for (int h : {1, 4, 16})
            CHECK(column_stddev(pool, h - 1) ==
                  doctest::Approx(5.0 * std::sqrt(static_cast<double>(h))).epsilon(0.03));
        // columns of one observation move together
        double cross = 0.0;
        for (int r = 0; r < pool.num_obs; ++r)
            cross += pool.at(r, 0) * pool.at(r, 15);
        const double correlation =
            cross / pool.num_obs / (column_stddev(pool, 0) * column_stddev(pool, 15));
        CHECK(correlation == doctest::Approx(0.6).epsilon(0.1));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(synth_pool(4, 10, -1.0, 0.5, 0), std::invalid_argument);
        CHECK_THROWS_AS(synth_pool(4, 10, 1.0, -0.5, 0), std::invalid_argument);
        CHECK_THROWS_AS(synth_pool(0, 10, 1.0, 0.5, 0), std::invalid_argument);
        CHECK_THROWS_AS(synth_pool(4, 10, 1.0, 0.5, 0, 1.5), std::invalid_argument);
        CHECK_THROWS_AS(synth_pool(4, 10, 1.0, 0.5, 0, -0.1), std::invalid_argument);
    }
}

TEST_CASE("probability normalization holds for random draws") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int horizon = 1 + static_cast<int>(rng.next_below(12));
        const int obs = 5 + static_cast<int>(rng.next_below(40));
        const int n = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(obs)));
        const ErrorPool pool = synth_pool(horizon, obs, 2.0, 0.7, rng.next_u64());
        PriceVector pd;
        pd.values.assign(static_cast<std::size_t>(horizon), 30.0);
        const ScenarioSet set = build_scenarios(pd, pool, n, rng.next_u64());
        double total = 0.0;
        for (double p : set.probabilities)
            total += p;
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}
