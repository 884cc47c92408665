#include <cmath>
#include <set>

#include "doctest.h"
#include "relo/dtw.hpp"
#include "relo/harness.hpp"
#include "relo/synthetic.hpp"

using namespace relo;

TEST_SUITE("synthetic") {

TEST_CASE("minimal two-zone dataset is finite and complete") {
    synth::SyntheticSpec spec;
    spec.zones = 2;
    spec.daily_demand = 40;
    const auto ds = synth::generate_zone_dataset(spec);
    CHECK(ds.trips.n1 == 2);
    CHECK(ds.trips.n3 == 96);
    for (double v : ds.trips.v) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }
    for (double v : ds.travel.values.v) CHECK(v > 0.0);
    for (double v : ds.activity.v) CHECK(v >= 0.0);
}

TEST_CASE("activity tracks delta times the trip row sums within 10 percent") {
    synth::SyntheticSpec spec;
    spec.zones = 20;
    spec.seed = 3;
    const auto ds = synth::generate_zone_dataset(spec);
    double act_total = 0, trip_total = 0;
    for (double v : ds.activity.v) act_total += v;
    for (double v : ds.trips.v) trip_total += v;
    CHECK(act_total / trip_total == doctest::Approx(spec.delta_target).epsilon(0.10));
}

TEST_CASE("distance decay: doubling distance halves flow at exponent one") {
    // the decay kernel itself, on a 3-point line
    const double d1 = 2000, d2 = 4000, d3 = 8000;
    CHECK(synth::distance_decay(d2, 1.0) / synth::distance_decay(d1, 1.0) ==
          doctest::Approx(0.5));
    CHECK(synth::distance_decay(d3, 1.0) / synth::distance_decay(d2, 1.0) ==
          doctest::Approx(0.5));
    CHECK(synth::distance_decay(d2, 2.0) / synth::distance_decay(d1, 2.0) ==
          doctest::Approx(0.25));

    // and through the generated tensor: farther destinations carry less
    // flow on average (rank correlation strongly negative)
    synth::SyntheticSpec spec;
    spec.zones = 40;
    spec.attraction_bias = 0.0;  // pure gravity, no rush-hour direction
    const auto ds = synth::generate_zone_dataset(spec);
    const int o = 0;
    std::vector<std::pair<double, double>> dist_flow;
    for (int j = 1; j < spec.zones; ++j) {
        double f = 0;
        for (int t = 0; t < 96; ++t) f += ds.trips.at(o, j, t);
        dist_flow.push_back({geo::dist(ds.centroids[o], ds.centroids[j]), f});
    }
    int concordant = 0, discordant = 0;
    for (size_t a = 0; a < dist_flow.size(); ++a)
        for (size_t b = a + 1; b < dist_flow.size(); ++b) {
            const double dd = dist_flow[a].first - dist_flow[b].first;
            const double df = dist_flow[a].second - dist_flow[b].second;
            if (dd * df < 0) ++concordant;  // farther means less flow
            else if (dd * df > 0) ++discordant;
        }
    CHECK(concordant > 2 * discordant);
}

TEST_CASE("generation is deterministic per seed") {
    synth::SyntheticSpec spec;
    spec.zones = 12;
    spec.seed = 77;
    const auto a = synth::generate_zone_dataset(spec);
    const auto b = synth::generate_zone_dataset(spec);
    CHECK(a.trips.v == b.trips.v);
    CHECK(a.activity.v == b.activity.v);
    CHECK(a.avail_history.v == b.avail_history.v);
}

TEST_CASE("cell dataset plants two interleaved temporal patterns") {
    synth::CellSpec spec;
    const auto ds = synth::generate_cell_dataset(spec);
    REQUIRE(ds.grid.size() > 20);
    std::set<int> patterns(ds.pattern_of.begin(), ds.pattern_of.end());
    CHECK(patterns == std::set<int>{0, 1});

    // same-pattern series are much closer than cross-pattern series
    int c0 = -1, c1 = -1, c0b = -1;
    for (int c = 0; c < ds.grid.size(); ++c) {
        if (ds.pattern_of[c] == 0 && c0 < 0) c0 = c;
        else if (ds.pattern_of[c] == 0 && c0b < 0) c0b = c;
        else if (ds.pattern_of[c] == 1 && c1 < 0) c1 = c;
    }
    REQUIRE(c0 >= 0);
    REQUIRE(c0b >= 0);
    REQUIRE(c1 >= 0);
    auto row = [&](const Matrix& m, int r) {
        return std::vector<double>(&m.v[static_cast<size_t>(r) * m.cols],
                                   &m.v[static_cast<size_t>(r) * m.cols] + m.cols);
    };
    const double same = dtw(row(ds.attrs.act_series, c0), row(ds.attrs.act_series, c0b));
    const double cross = dtw(row(ds.attrs.act_series, c0), row(ds.attrs.act_series, c1));
    CHECK(cross > 3.0 * same);
}

TEST_CASE("aggregation conserves total demand and yields a usable instance") {
    synth::CellSpec spec;
    const auto cells = synth::generate_cell_dataset(spec);
    // trivial partition: everything in one zone vs a 2-zone split
    std::vector<int> halves(cells.grid.size());
    for (int c = 0; c < cells.grid.size(); ++c)
        halves[c] = cells.grid.cell(c).center.x > 0 ? 1 : 0;
    const auto ds = synth::aggregate_cells(cells, halves, 2, spec);
    double total = 0;
    for (double v : ds.trips.v) total += v;
    CHECK(total == doctest::Approx(spec.daily_demand).epsilon(1e-6));

    const auto inst = harness::make_instance(ds, 20, 2, spec.delta_target);
    CHECK(inst.zones() == 2);
    CHECK(inst.lambda.values.min_positive() > 0.0);
}

}  // TEST_SUITE
