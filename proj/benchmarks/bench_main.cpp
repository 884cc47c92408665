#include <benchmark/benchmark.h>

#include "relo/dtw.hpp"
#include "relo/localmip.hpp"
#include "relo/relocation.hpp"
#include "relo/synthetic.hpp"

using namespace relo;

namespace {

std::vector<double> random_series(int n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> s(n);
    for (double& v : s) v = rng.next_double() * 10.0;
    return s;
}

void bm_dtw_96(benchmark::State& state) {
    const auto x = random_series(96, 1);
    const auto y = random_series(96, 2);
    for (auto _ : state) benchmark::DoNotOptimize(dtw(x, y));
}
BENCHMARK(bm_dtw_96);

void bm_poisson_row(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(7);
    for (auto _ : state) {
        long total = 0;
        for (int k = 0; k < n; ++k) total += poisson(rng, 0.15);
        benchmark::DoNotOptimize(total);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_poisson_row)->Arg(63)->Arg(365);

void bm_scenario_sample(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    demand::LambdaTensor lt;
    lt.values = Tensor3(n, n, 96, 0.03);
    demand::ScenarioSampler sampler(lt, std::vector<double>(n, 1.0));
    uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(300, 7, ++seed));
}
BENCHMARK(bm_scenario_sample)->Arg(63);

void bm_policy_slot(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    synth::SyntheticSpec spec;
    spec.zones = n;
    const auto ds = synth::generate_zone_dataset(spec);
    demand::LambdaTensor lt;
    lt.values = ds.trips;
    sim::SimState st;
    st.x_v.assign(n, 5);
    st.x_s.assign(n, 0);
    st.x_s[0] = st.x_s[n / 2] = 2;
    st.arrivals_v.assign(120, std::vector<long>(n, 0));
    st.arrivals_s.assign(120, std::vector<long>(n, 0));
    st.pending_intent.assign(120, std::vector<long>(n, 0));
    policy::RelocParams params;
    params.w_d = 26.0;
    params.r_th = -3.0;
    std::vector<double> x_hat(n, 5.0);
    const auto demand_pred = pred::DemandPredictor::lambda_baseline(&lt.values);
    for (auto _ : state) {
        auto stc = st;
        auto U = policy::imbalance(x_hat, demand_pred.predict(34), params.w_d);
        sim::DecisionLog log;
        policy::schedule_relocation(stc, ds.travel, params, 32, U, log);
        policy::schedule_transits(stc, ds.travel, params, 32, U, log);
        benchmark::DoNotOptimize(log);
    }
}
BENCHMARK(bm_policy_slot)->Arg(63)->Arg(365);

void bm_local_relocation_solve(benchmark::State& state) {
    const int n = 63;
    synth::SyntheticSpec spec;
    spec.zones = n;
    const auto ds = synth::generate_zone_dataset(spec);
    Rng rng(5);
    std::vector<double> U(n);
    std::vector<long> caps(n, 0);
    for (int i = 0; i < n; ++i) U[i] = rng.next_double() * 12 - 6;
    caps[3] = 2;
    caps[17] = 1;
    caps[40] = 2;
    policy::RelocParams params;
    params.w_tt = 0.02;
    params.r_th = 0.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(mip::solve_local_relocation(U, ds.travel, caps, params, 30, 50.0));
}
BENCHMARK(bm_local_relocation_solve);

}  // namespace

BENCHMARK_MAIN();
