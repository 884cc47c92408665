#include <cmath>

#include "doctest.h"
#include "relo/harness.hpp"

using namespace relo;

namespace {

harness::Instance tiny_instance(double lambda_scale, long fleet, long staff) {
    synth::SyntheticSpec spec;
    spec.zones = 8;
    spec.daily_demand = 160.0 * lambda_scale;
    spec.seed = 21;
    return harness::make_instance(synth::generate_zone_dataset(spec), fleet, staff,
                                  spec.delta_target);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("history r2: smooth AR-like series favor shorter averaging windows") {
    const int L = 600;
    Matrix hist(3, L);
    Rng rng(5);
    for (int z = 0; z < 3; ++z) {
        double x = 10.0;
        for (int t = 0; t < L; ++t) {
            x = 10.0 + 0.95 * (x - 10.0) + 0.4 * rng.next_gaussian();
            hist.at(z, t) = x;
        }
    }
    pred::PredictorConfig last;
    last.kind = pred::AvailabilityKind::last;
    last.horizon = 2;
    pred::PredictorConfig ma4;
    ma4.kind = pred::AvailabilityKind::moving_average;
    ma4.window = 4;
    ma4.horizon = 2;
    pred::PredictorConfig ma6 = ma4;
    ma6.window = 6;

    const double r_last = harness::history_r2(last, hist);
    const double r_ma4 = harness::history_r2(ma4, hist);
    const double r_ma6 = harness::history_r2(ma6, hist);
    CHECK(r_last > 0.5);
    CHECK(r_ma4 >= r_ma6);
}

TEST_CASE("staff sweep: the zero-staff row is its own baseline") {
    auto inst = tiny_instance(1.0, 24, 2);
    harness::PolicySpec rb;
    rb.kind = harness::PolicyKind::ranking;
    rb.params.w_d = 8.0;
    rb.params.r_th = -2.0;
    const auto rows = harness::staff_sweep(inst, {0, 2}, rb, 10, 3, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].staff == 0);
    CHECK(rows[0].dt_pct == 0.0);
    CHECK(rows[0].dn_pct == 0.0);
}

TEST_CASE("predictor benchmark is reproducible for identical seeds") {
    auto inst = tiny_instance(1.0, 24, 2);
    harness::PolicySpec spec;
    spec.kind = harness::PolicyKind::ranking;
    spec.params.w_d = 8.0;
    spec.params.r_th = -2.0;
    spec.availability.kind = pred::AvailabilityKind::moving_average;
    spec.availability.window = 4;
    const auto a = harness::predictor_bench(inst, {spec}, 8, 5, 1);
    const auto b = harness::predictor_bench(inst, {spec}, 8, 5, 2);
    REQUIRE(a.size() == 1);
    CHECK(a[0].trips == b[0].trips);
    CHECK(a[0].trip_time == doctest::Approx(b[0].trip_time).epsilon(1e-12));
    CHECK(a[0].r2 == doctest::Approx(b[0].r2));
}

TEST_CASE("policy comparison rows coincide on zero-demand scenarios") {
    auto inst = tiny_instance(1.0, 16, 2);
    inst.lambda.values = Tensor3(inst.zones(), inst.zones(), inst.horizon, 0.0);
    harness::PolicySpec rb;
    rb.kind = harness::PolicyKind::ranking;
    harness::PolicySpec mipspec;
    mipspec.kind = harness::PolicyKind::local_mip;
    const auto res = harness::compare_mip(inst, rb, mipspec, 5, 3, 1);
    REQUIRE(res.rows.size() == 3);
    for (const auto& r : res.rows) {
        CHECK(r.n_mean == 0.0);
        CHECK(r.t_mean == 0.0);
    }
}

TEST_CASE("tuning on an instance respects the budget and returns the argmax") {
    auto inst = tiny_instance(1.0, 24, 2);
    harness::TuneOptions opt;
    opt.budget = 8;
    opt.scenarios_per_trial = 3;
    opt.seed = 4;
    opt.policy.kind = harness::PolicyKind::ranking;
    const auto res = harness::tune_instance(inst, opt);
    CHECK(res.history.size() == 8);
    double best = -1e18;
    for (const auto& tr : res.history) best = std::max(best, tr.objective.value);
    CHECK(res.best.objective.value == doctest::Approx(best));
}

}  // TEST_SUITE
