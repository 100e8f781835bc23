#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cgvm/errors.hpp"
#include "cgvm/hops.hpp"

using namespace cgvm;

namespace {

MetricSeries series_of(std::vector<double> vals, const std::string& id = "s") {
    MetricSeries s;
    s.sample_id = id;
    s.metric_name = "m";
    s.per_hop = std::move(vals);
    return s;
}

}  // namespace

TEST_CASE("three hops on a three-point grid reproduce the inputs exactly") {
    const MetricSeries n = normalize_hops(series_of({0.2, 0.9, 0.4}), 3);
    REQUIRE(n.normalized.size() == 3);
    CHECK(n.normalized[0].first == 0.0);
    CHECK(n.normalized[1].first == 0.5);
    CHECK(n.normalized[2].first == 1.0);
    CHECK(n.normalized[0].second == 0.2);
    CHECK(n.normalized[1].second == 0.9);
    CHECK(n.normalized[2].second == 0.4);
}

TEST_CASE("hop nodes that coincide with grid points keep their exact values") {
    // 5 hops on an 11-point grid: hops sit on grid points 0, 2.5, 5, 7.5, 10
    const MetricSeries n = normalize_hops(series_of({1, 2, 3, 4, 5}), 11);
    REQUIRE(n.normalized.size() == 11);
    CHECK(n.normalized[0].second == 1.0);
    CHECK(n.normalized[5].second == 3.0);
    CHECK(n.normalized[10].second == 5.0);
    // in-between points interpolate linearly
    CHECK(n.normalized[1].second == doctest::Approx(1.4));
}

TEST_CASE("a single-hop series is constant over the whole grid") {
    const MetricSeries n = normalize_hops(series_of({0.7}), 11);
    REQUIRE(n.normalized.size() == 11);
    for (const auto& [t, v] : n.normalized) {
        CHECK(v == 0.7);
    }
}

TEST_CASE("interpolation respects the envelope and preserves monotonicity") {
    std::mt19937 rng(43);
    std::uniform_int_distribution<int> hops(2, 9);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> vals(hops(rng));
        for (double& v : vals) v = val(rng);
        if (trial % 2 == 0) std::sort(vals.begin(), vals.end());

        const MetricSeries n = normalize_hops(series_of(vals), 11);
        const double lo = *std::min_element(vals.begin(), vals.end());
        const double hi = *std::max_element(vals.begin(), vals.end());
        for (const auto& [t, v] : n.normalized) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
        if (trial % 2 == 0) {
            for (size_t i = 1; i < n.normalized.size(); ++i) {
                CHECK(n.normalized[i].second >= n.normalized[i - 1].second - 1e-12);
            }
        }
    }
}

TEST_CASE("empty series are rejected") {
    CHECK_THROWS_AS(normalize_hops(series_of({}), 11), EmptySeries);
}

TEST_CASE("corpus aggregation takes one value per series") {
    std::vector<MetricSeries> all;
    for (double v : {1.0, 2.0, 3.0}) {
        auto s = normalize_hops(series_of({0.0, v}), 3);
        all.push_back(s);
    }
    const auto rows = aggregate(all, GroupBy::Corpus);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].group == "corpus");
    CHECK(rows[0].n == 3);
    CHECK(rows[0].mean == doctest::Approx(2.0));
    CHECK(rows[0].max == 3.0);
    // population standard deviation of {1, 2, 3}
    CHECK(rows[0].std_dev == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("category aggregation groups by the parallel category labels") {
    std::vector<MetricSeries> all;
    std::vector<std::string> cats;
    for (double v : {1.0, 3.0}) {
        all.push_back(normalize_hops(series_of({v}), 3));
        cats.push_back("animal");
    }
    all.push_back(normalize_hops(series_of({10.0}), 3));
    cats.push_back("human");
    const auto rows = aggregate(all, GroupBy::Category, cats);
    REQUIRE(rows.size() == 2);
    const auto& animal = rows[0].group == "animal" ? rows[0] : rows[1];
    const auto& human = rows[0].group == "animal" ? rows[1] : rows[0];
    CHECK(animal.n == 2);
    CHECK(animal.mean == doctest::Approx(2.0));
    CHECK(human.n == 1);
    CHECK(human.mean == 10.0);
    CHECK(human.std_dev == 0.0);
}

TEST_CASE("grid-point aggregation pools every series at each grid node") {
    std::vector<MetricSeries> all;
    all.push_back(normalize_hops(series_of({0.0, 1.0}), 3));
    all.push_back(normalize_hops(series_of({1.0, 0.0}), 3));
    const auto rows = aggregate(all, GroupBy::GridPoint);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.n == 2);
        CHECK(r.mean == doctest::Approx(0.5));
    }
}

TEST_CASE("non-finite values are excluded and counted, never averaged") {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<MetricSeries> all;
    all.push_back(normalize_hops(series_of({5.0, inf}), 3));
    all.push_back(normalize_hops(series_of({5.0, 40.0}), 3));
    const auto rows = aggregate(all, GroupBy::Corpus);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 1);
    CHECK(rows[0].excluded_nonfinite == 1);
    CHECK(rows[0].mean == 40.0);
    CHECK(std::isfinite(rows[0].max));

    // all values excluded: the row is still emitted so the exclusion is visible
    std::vector<MetricSeries> only_inf;
    only_inf.push_back(normalize_hops(series_of({inf}), 3));
    const auto empty_rows = aggregate(only_inf, GroupBy::Corpus);
    REQUIRE(empty_rows.size() == 1);
    CHECK(empty_rows[0].n == 0);
    CHECK(empty_rows[0].excluded_nonfinite == 1);
}

TEST_CASE("aggregating nothing is an error") {
    CHECK_THROWS_AS(aggregate({}, GroupBy::Corpus), EmptyGroup);
}
