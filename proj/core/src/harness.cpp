#include "relo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "relo/csv.hpp"
#include "relo/dtw.hpp"

namespace relo::harness {

Instance make_instance(const synth::ZoneDataset& ds, long fleet, long staff, double delta) {
    Instance inst;
    const Tensor3 smoothed = demand::smooth_trips(ds.trips, nullptr);
    inst.lambda = demand::calibrate_lambda(smoothed, ds.activity, delta);
    inst.lambda.delta = delta;
    inst.travel = ds.travel;
    inst.presence = ds.presence_weights;
    inst.avail_history = ds.avail_history;
    inst.events = ds.events;
    inst.fleet = fleet;
    inst.staff = staff;
    inst.horizon = ds.travel.slots();
    return inst;
}

std::string PolicySpec::name() const {
    switch (kind) {
        case PolicyKind::none:
            return "noopt";
        case PolicyKind::local_mip:
            return "local-mip";
        case PolicyKind::ranking:
            break;
    }
    switch (availability.kind) {
        case pred::AvailabilityKind::last:
            return "ranking-last";
        case pred::AvailabilityKind::moving_average:
            return "ranking-ma" + std::to_string(availability.window);
        case pred::AvailabilityKind::linear_l1:
            return "ranking-linear-l1";
        case pred::AvailabilityKind::linear_l2:
            return "ranking-linear-l2";
    }
    return "ranking";
}

sim::PolicyFactory make_policy_factory(const PolicySpec& spec, const Instance& inst) {
    if (spec.kind == PolicyKind::none) return {};

    // one fitted prototype reused by every scenario
    auto availability = std::make_shared<pred::AvailabilityPredictor>(
        spec.availability, inst.zones(), std::max(spec.availability.window + 2, 8));
    if (spec.availability.kind == pred::AvailabilityKind::linear_l1 ||
        spec.availability.kind == pred::AvailabilityKind::linear_l2)
        availability->fit(inst.avail_history);
    const int L = inst.avail_history.cols;
    for (int z = 0; z < inst.zones(); ++z) {
        std::span<const double> row(&inst.avail_history.v[static_cast<size_t>(z) * L], L);
        availability->seed_history(z, row);
    }

    auto demand_density = std::make_shared<pred::DemandPredictor>(
        spec.demand_mode == pred::DemandMode::lambda_baseline
            ? pred::DemandPredictor::lambda_baseline(&inst.lambda.values)
            : pred::DemandPredictor::kde(inst.events, inst.horizon, spec.kde_bandwidth));

    const policy::RelocParams params = spec.params;
    const PolicyKind kind = spec.kind;
    const double budget = spec.mip_budget_ms;
    return [availability, demand_density, params, kind, budget]() -> std::unique_ptr<sim::Policy> {
        policy::PredictorSet ps;
        ps.availability = std::make_shared<pred::AvailabilityPredictor>(*availability);
        ps.demand_density = demand_density;  // stateless, shareable
        if (kind == PolicyKind::local_mip)
            return std::make_unique<mip::LocalMipPolicy>(params, std::move(ps), budget);
        return std::make_unique<policy::RankingPolicy>(params, std::move(ps));
    };
}

sim::SaaResult run_batch(const Instance& inst, const PolicySpec& spec, int scenarios,
                         uint64_t seed, int threads, const sim::RunOptions& opt) {
    demand::ScenarioSampler sampler(inst.lambda, inst.presence);
    sim::SimInputs in;
    in.travel = &inst.travel;
    in.horizon = inst.horizon;
    return sim::run_saa(sampler, scenarios, make_policy_factory(spec, inst), inst.fleet,
                        inst.staff, seed, in, threads, opt);
}

namespace {

double mean_of(const std::vector<sim::Metrics>& ms, double (*get)(const sim::Metrics&)) {
    double s = 0.0;
    for (const auto& m : ms) s += get(m);
    return ms.empty() ? 0.0 : s / ms.size();
}

double std_of(const std::vector<sim::Metrics>& ms, double (*get)(const sim::Metrics&)) {
    if (ms.size() < 2) return 0.0;
    const double mu = mean_of(ms, get);
    double v = 0.0;
    for (const auto& m : ms) v += (get(m) - mu) * (get(m) - mu);
    return std::sqrt(v / (ms.size() - 1));
}

double get_time(const sim::Metrics& m) { return m.trip_time; }
double get_trips(const sim::Metrics& m) { return static_cast<double>(m.trips); }
double get_reloc(const sim::Metrics& m) { return static_cast<double>(m.relocations); }
double get_transits(const sim::Metrics& m) { return static_cast<double>(m.transits); }
double get_conflicts(const sim::Metrics& m) { return static_cast<double>(m.conflicts); }

}  // namespace

std::vector<StaffSweepRow> staff_sweep(Instance inst, const std::vector<long>& staff_sizes,
                                       const PolicySpec& spec, int scenarios, uint64_t seed,
                                       int threads) {
    if (staff_sizes.empty()) throw std::invalid_argument("staff_sweep: empty staff range");
    std::vector<StaffSweepRow> rows;
    double base_t = 0.0, base_n = 0.0;
    bool have_base = false;
    for (long staff : staff_sizes) {
        inst.staff = staff;
        PolicySpec noopt;
        noopt.kind = PolicyKind::none;
        const auto res =
            run_batch(inst, staff == 0 ? noopt : spec, scenarios, seed, threads);
        StaffSweepRow r;
        r.staff = staff;
        r.t_mean = mean_of(res.per_scenario, get_time);
        r.t_std = std_of(res.per_scenario, get_time);
        r.n_mean = mean_of(res.per_scenario, get_trips);
        r.n_std = std_of(res.per_scenario, get_trips);
        if (!have_base) {
            base_t = r.t_mean;
            base_n = r.n_mean;
            have_base = true;
        }
        r.dt_pct = base_t > 0 ? 100.0 * (r.t_mean - base_t) / base_t : 0.0;
        r.dn_pct = base_n > 0 ? 100.0 * (r.n_mean - base_n) / base_n : 0.0;
        rows.push_back(r);
    }
    return rows;
}

void write_staff_sweep_csv(const std::filesystem::path& path,
                           const std::vector<StaffSweepRow>& rows) {
    csv::Writer w(path);
    w.raw_line("staff,t_mean_h,t_std_h,dt_pct,n_mean,n_std,dn_pct");
    for (const auto& r : rows)
        w.row({std::to_string(r.staff), csv::fmt(r.t_mean, 4), csv::fmt(r.t_std, 4),
               csv::fmt(r.dt_pct, 4), csv::fmt(r.n_mean, 4), csv::fmt(r.n_std, 4),
               csv::fmt(r.dn_pct, 4)});
}

std::vector<ZoningImpactRow> zoning_impact(const ZoningImpactOptions& opt) {
    const synth::CellDataset cells = synth::generate_cell_dataset(opt.cells);
    const int C = cells.grid.size();

    std::vector<geo::Point> centers;
    centers.reserve(C);
    for (const auto& c : cells.grid.cells) centers.push_back(c.center);

    struct Method {
        std::string name;
        std::vector<int> zone_of;
        int zones;
    };
    std::vector<Method> methods;

    const zoning::ZoningResult zr =
        zoning::agglomerative_cluster(cells.grid, cells.attrs, cells.roads, opt.zoning_options);
    const int k = static_cast<int>(zr.zones.size());
    methods.push_back({"zoning", zr.zone_of, k});

    auto densify = [&](std::vector<int> assign) {
        // ensure labels are 0..k-1 dense
        std::vector<int> remap(assign.size(), -1);
        int next = 0;
        for (int& a : assign) {
            if (remap[a] < 0) remap[a] = next++;
            a = remap[a];
        }
        return std::make_pair(assign, next);
    };

    {
        auto [a, n] = densify(cluster::kmeans(centers, k, derive(opt.seed, 0x717ull)));
        methods.push_back({"kmeans", a, n});
    }
    {
        auto [a, n] = densify(cluster::bisecting_kmeans(centers, k, derive(opt.seed, 0x718ull)));
        methods.push_back({"bkmeans", a, n});
    }
    for (auto [name, linkage] :
         {std::pair{"ac-average", cluster::Linkage::average},
          std::pair{"ac-complete", cluster::Linkage::complete},
          std::pair{"ac-ward", cluster::Linkage::ward}}) {
        auto [a, n] = densify(cluster::agglomerative_euclidean(centers, k, linkage));
        methods.push_back({name, a, n});
    }

    std::vector<ZoningImpactRow> rows;
    for (const auto& m : methods) {
        const synth::ZoneDataset ds = synth::aggregate_cells(cells, m.zone_of, m.zones, opt.cells);
        const Instance inst = make_instance(ds, opt.fleet, opt.staff, opt.cells.delta_target);

        PolicySpec rb;
        rb.kind = PolicyKind::ranking;
        rb.params = opt.params;
        PolicySpec noopt;
        noopt.kind = PolicyKind::none;
        const auto base = run_batch(inst, noopt, opt.scenarios, opt.seed, opt.threads);
        const auto tuned = run_batch(inst, rb, opt.scenarios, opt.seed, opt.threads);

        ZoningImpactRow r;
        r.method = m.name;
        r.zones = m.zones;
        r.n_random = mean_of(base.per_scenario, get_trips);
        r.n_opt = mean_of(tuned.per_scenario, get_trips);
        r.dn_pct = r.n_random > 0 ? 100.0 * (r.n_opt - r.n_random) / r.n_random : 0.0;
        r.t_random = mean_of(base.per_scenario, get_time);
        r.t_opt = mean_of(tuned.per_scenario, get_time);
        r.dt_pct = r.t_random > 0 ? 100.0 * (r.t_opt - r.t_random) / r.t_random : 0.0;
        r.relocations = mean_of(tuned.per_scenario, get_reloc);
        r.transits = mean_of(tuned.per_scenario, get_transits);
        r.conflicts = mean_of(tuned.per_scenario, get_conflicts);
        rows.push_back(r);
    }
    return rows;
}

void write_zoning_impact_csv(const std::filesystem::path& path,
                             const std::vector<ZoningImpactRow>& rows) {
    csv::Writer w(path);
    w.raw_line("method,zones,n_random,n_opt,dn_pct,t_random,t_opt,dt_pct,reloc,transits,conflicts");
    for (const auto& r : rows)
        w.row({r.method, std::to_string(r.zones), csv::fmt(r.n_random, 4), csv::fmt(r.n_opt, 4),
               csv::fmt(r.dn_pct, 4), csv::fmt(r.t_random, 4), csv::fmt(r.t_opt, 4),
               csv::fmt(r.dt_pct, 4), csv::fmt(r.relocations, 4), csv::fmt(r.transits, 4),
               csv::fmt(r.conflicts, 4)});
}

double history_r2(const pred::PredictorConfig& cfg, const Matrix& history) {
    const int zones = history.rows;
    const int L = history.cols;
    const int h = cfg.horizon;
    const int train_len = static_cast<int>(std::floor(0.7 * L));
    double sum = 0.0;
    int scored = 0;

    for (int z = 0; z < zones; ++z) {
        std::span<const double> full(&history.v[static_cast<size_t>(z) * L], L);
        std::vector<double> coef;
        if (cfg.kind == pred::AvailabilityKind::linear_l1 ||
            cfg.kind == pred::AvailabilityKind::linear_l2) {
            coef = pred::fit_linear(full.subspan(0, train_len), cfg.window, h,
                                    cfg.kind == pred::AvailabilityKind::linear_l1
                                        ? pred::Penalty::l1
                                        : pred::Penalty::l2,
                                    cfg.strength);
        }
        double y_mean = 0.0;
        int cnt = 0;
        for (int q = train_len; q < L; ++q) {
            y_mean += full[q];
            ++cnt;
        }
        if (cnt == 0) continue;
        y_mean /= cnt;
        double ss_res = 0.0, ss_tot = 0.0;
        for (int q = train_len; q < L; ++q) {
            double yhat = 0.0;
            switch (cfg.kind) {
                case pred::AvailabilityKind::last:
                    yhat = full[q - h];
                    break;
                case pred::AvailabilityKind::moving_average: {
                    double s = 0.0;
                    for (int k = 0; k < cfg.window; ++k) s += full[q - h - k];
                    yhat = s / cfg.window;
                    break;
                }
                default:
                    yhat = pred::predict_linear(
                        std::span<const double>(&full[q - h - cfg.window + 1], cfg.window), coef);
            }
            ss_res += (full[q] - yhat) * (full[q] - yhat);
            ss_tot += (full[q] - y_mean) * (full[q] - y_mean);
        }
        if (ss_tot <= 0.0) continue;
        sum += 1.0 - ss_res / ss_tot;
        ++scored;
    }
    return scored > 0 ? sum / scored : 0.0;
}

std::vector<PredictorBenchRow> predictor_bench(const Instance& inst,
                                               const std::vector<PolicySpec>& predictors,
                                               int scenarios, uint64_t seed, int threads,
                                               const std::filesystem::path& coef_dir) {
    std::vector<PredictorBenchRow> rows;
    for (const auto& spec : predictors) {
        if (!coef_dir.empty() && (spec.availability.kind == pred::AvailabilityKind::linear_l1 ||
                                  spec.availability.kind == pred::AvailabilityKind::linear_l2)) {
            pred::AvailabilityPredictor fitted(spec.availability, inst.zones(),
                                               spec.availability.window + 2);
            fitted.fit(inst.avail_history);
            std::vector<std::vector<double>> coef;
            for (int z = 0; z < inst.zones(); ++z) coef.push_back(fitted.coefficients(z));
            pred::write_coefficients_csv(
                (coef_dir / ("coefficients_" + spec.name() + ".csv")).string(), coef);
        }
        const auto res = run_batch(inst, spec, scenarios, seed, threads);
        PredictorBenchRow r;
        r.name = spec.name();
        r.r2 = history_r2(spec.availability, inst.avail_history);
        r.trips = mean_of(res.per_scenario, get_trips);
        r.trip_time = mean_of(res.per_scenario, get_time);
        r.relocations = mean_of(res.per_scenario, get_reloc);
        r.transits = mean_of(res.per_scenario, get_transits);
        r.conflicts = mean_of(res.per_scenario, get_conflicts);
        rows.push_back(r);
    }
    return rows;
}

void write_predictor_bench_csv(const std::filesystem::path& path,
                               const std::vector<PredictorBenchRow>& rows) {
    csv::Writer w(path);
    w.raw_line("predictor,r2,trips,trip_time_h,relocations,transits,conflicts");
    for (const auto& r : rows)
        w.row({r.name, csv::fmt(r.r2, 4), csv::fmt(r.trips, 4), csv::fmt(r.trip_time, 4),
               csv::fmt(r.relocations, 4), csv::fmt(r.transits, 4), csv::fmt(r.conflicts, 4)});
}

CompareMipResult compare_mip(const Instance& inst, const PolicySpec& ranking,
                             const PolicySpec& mip, int scenarios, uint64_t seed, int threads) {
    PolicySpec nospec;
    nospec.kind = PolicyKind::none;
    const auto noopt = run_batch(inst, nospec, scenarios, seed, threads);
    const auto rb = run_batch(inst, ranking, scenarios, seed, threads);
    const auto lm = run_batch(inst, mip, scenarios, seed, threads);

    CompareMipResult out;
    auto row = [&](const std::string& name, const sim::SaaResult& res, double bn, double bt,
                   bool budget) {
        CompareMipResult::Row r;
        r.algorithm = name;
        r.n_mean = mean_of(res.per_scenario, get_trips);
        r.t_mean = mean_of(res.per_scenario, get_time);
        r.dn_pct = bn > 0 ? 100.0 * (r.n_mean - bn) / bn : 0.0;
        r.dt_pct = bt > 0 ? 100.0 * (r.t_mean - bt) / bt : 0.0;
        r.relocations = mean_of(res.per_scenario, get_reloc);
        r.transits = mean_of(res.per_scenario, get_transits);
        r.conflicts = mean_of(res.per_scenario, get_conflicts);
        r.budget_flagged = budget;
        return r;
    };
    const double bn = mean_of(noopt.per_scenario, get_trips);
    const double bt = mean_of(noopt.per_scenario, get_time);
    out.rows.push_back(row("noopt", noopt, bn, bt, false));
    out.rows.push_back(row("ranking", rb, bn, bt, false));
    out.rows.push_back(row("local-mip", lm, bn, bt, lm.budget_exceeded));
    for (const auto& m : noopt.per_scenario) out.noopt_scores.push_back(m.trip_time);
    for (const auto& m : rb.per_scenario) out.rb_scores.push_back(m.trip_time);
    for (const auto& m : lm.per_scenario) out.mip_scores.push_back(m.trip_time);
    return out;
}

void write_compare_mip_csv(const std::filesystem::path& path, const CompareMipResult& res) {
    csv::Writer w(path);
    w.raw_line("algorithm,n_mean,dn_pct,t_mean,dt_pct,reloc,transits,conflicts,budget_flagged");
    for (const auto& r : res.rows)
        w.row({r.algorithm, csv::fmt(r.n_mean, 4), csv::fmt(r.dn_pct, 4), csv::fmt(r.t_mean, 4),
               csv::fmt(r.dt_pct, 4), csv::fmt(r.relocations, 4), csv::fmt(r.transits, 4),
               csv::fmt(r.conflicts, 4), r.budget_flagged ? "1" : "0"});
}

std::vector<ScalabilityRow> scalability(const ScalabilityOptions& opt) {
    synth::SyntheticSpec base = opt.base;
    base.zones = *std::max_element(opt.zone_counts.begin(), opt.zone_counts.end());
    const synth::ZoneDataset full = synth::generate_zone_dataset(base);

    std::vector<ScalabilityRow> rows;
    for (int nz : opt.zone_counts) {
        // random zone subset, seeded per configuration
        std::vector<int> ids(base.zones);
        std::iota(ids.begin(), ids.end(), 0);
        Rng rng(derive(opt.seed, 0x5ca1eull, nz));
        for (int i = base.zones - 1; i > 0; --i)
            std::swap(ids[i], ids[rng.next_below(i + 1)]);
        ids.resize(nz);
        std::sort(ids.begin(), ids.end());

        synth::ZoneDataset sliced;
        sliced.trips = Tensor3(nz, nz, base.slots);
        sliced.activity = Matrix(nz, base.slots);
        sliced.travel.values = Tensor3(nz, nz, base.slots);
        sliced.travel.horizon = base.slots;
        sliced.presence_weights.resize(nz);
        for (int a = 0; a < nz; ++a) {
            sliced.presence_weights[a] = full.presence_weights[ids[a]];
            for (int t = 0; t < base.slots; ++t)
                sliced.activity.at(a, t) = full.activity.at(ids[a], t);
            for (int b = 0; b < nz; ++b)
                for (int t = 0; t < base.slots; ++t) {
                    sliced.trips.at(a, b, t) = full.trips.at(ids[a], ids[b], t);
                    sliced.travel.values.at(a, b, t) = full.travel.values.at(ids[a], ids[b], t);
                }
        }
        sliced.avail_history = Matrix(nz, 2 * base.slots, 4.0);
        sliced.events.assign(nz, {34.0});
        sliced.centroids.resize(nz);

        for (long staff : opt.staff_sizes) {
            Instance inst = make_instance(sliced, opt.fleet, staff, base.delta_target);
            sim::RunOptions ro;
            ro.time_policy = true;
            const auto res = run_batch(inst, opt.policy, opt.scenarios, opt.seed, opt.threads, ro);
            ScalabilityRow r;
            r.zones = nz;
            r.staff = staff;
            double mean = 0.0;
            for (double s : res.policy_seconds) mean += s;
            mean /= res.policy_seconds.size();
            double var = 0.0;
            for (double s : res.policy_seconds) var += (s - mean) * (s - mean);
            r.mean_seconds = mean;
            r.std_seconds = res.policy_seconds.size() > 1
                                ? std::sqrt(var / (res.policy_seconds.size() - 1))
                                : 0.0;
            rows.push_back(r);
        }
    }
    return rows;
}

void write_scalability_csv(const std::filesystem::path& path,
                           const std::vector<ScalabilityRow>& rows) {
    csv::Writer w(path);
    w.raw_line("zones,staff,mean_policy_seconds,std_policy_seconds");
    for (const auto& r : rows)
        w.row({std::to_string(r.zones), std::to_string(r.staff), csv::fmt(r.mean_seconds),
               csv::fmt(r.std_seconds)});
}

tune::SearchResult tune_instance(const Instance& inst, const TuneOptions& opt) {
    // fixed scenario batch across every trial (common random numbers)
    demand::ScenarioSampler sampler(inst.lambda, inst.presence);
    std::vector<demand::Scenario> batch;
    batch.reserve(opt.scenarios_per_trial);
    for (int s = 0; s < opt.scenarios_per_trial; ++s)
        batch.push_back(sampler.sample(inst.fleet, inst.staff, derive(opt.seed, s)));

    sim::SimInputs in;
    in.travel = &inst.travel;
    in.horizon = inst.horizon;

    const auto eval = [&](const policy::RelocParams& params) {
        PolicySpec spec = opt.policy;
        spec.params = params;
        const auto factory = make_policy_factory(spec, inst);
        std::vector<sim::Metrics> metrics(batch.size());
        for (size_t s = 0; s < batch.size(); ++s) {
            auto pol = factory();
            metrics[s] = sim::run_scenario(batch[s], in, pol.get()).metrics;
        }
        tune::Objective obj;
        obj.value = tune::tuning_objective(metrics);
        double t = 0, r = 0, tr = 0;
        for (const auto& m : metrics) {
            t += m.trip_time;
            r += static_cast<double>(m.relocations);
            tr += static_cast<double>(m.transits);
        }
        obj.t_mean = t / metrics.size();
        obj.relocations = r / metrics.size();
        obj.transits = tr / metrics.size();
        return obj;
    };
    return tune::search(opt.space, opt.budget, opt.strategy, eval, opt.seed);
}

}  // namespace relo::harness
