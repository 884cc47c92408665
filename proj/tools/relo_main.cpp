// relo: staff-based vehicle relocation toolkit for free-floating car
// sharing. Subcommands cover the whole pipeline: synthetic data, zoning,
// demand calibration, simulation, tuning, and the benchmark harnesses.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "relo/config.hpp"
#include "relo/csv.hpp"
#include "relo/harness.hpp"

namespace fs = std::filesystem;
using namespace relo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitBudget = 4;

struct GlobalOpts {
    std::string config;
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int threads = 0;
    int scenarios = 0;
};

int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

cfg::RunConfig load_config_or_exit(const GlobalOpts& g) {
    if (g.config.empty()) throw CLI::ValidationError("--config is required for this command");
    cfg::RunConfig rc = cfg::load_run_config(g.config);
    if (g.seed_set) rc.seed = g.seed;
    if (!g.out.empty()) rc.out = g.out;
    if (g.threads > 0) rc.threads = g.threads;
    if (g.scenarios > 0) rc.scenarios = g.scenarios;
    rc.threads = effective_threads(rc.threads);
    fs::create_directories(rc.out);
    return rc;
}

std::vector<long> parse_range(const std::string& text) {
    // "0:20" or "3,7,10"
    std::vector<long> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const long lo = std::stol(text.substr(0, colon));
        const long hi = std::stol(text.substr(colon + 1));
        for (long v = lo; v <= hi; ++v) out.push_back(v);
    } else {
        for (const auto& f : csv::split_line(text, ',')) out.push_back(std::stol(f));
    }
    if (out.empty()) throw CLI::ValidationError("empty range: " + text);
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& f : csv::split_line(text, ',')) out.push_back(std::stod(f));
    return out;
}

void write_instance_files(const synth::ZoneDataset& ds, const fs::path& dir, long fleet,
                          long staff, double delta, uint64_t seed) {
    csv::write_tensor(dir / "trips.csv", ds.trips, "trips");
    csv::write_matrix_long(dir / "activity.csv", ds.activity, "count");
    csv::write_tensor(dir / "travel.csv", ds.travel.values, "minutes");
    {
        csv::Writer w(dir / "presence.csv");
        w.raw_line("zone_id,weight");
        for (size_t z = 0; z < ds.presence_weights.size(); ++z)
            w.row({std::to_string(z), csv::fmt(ds.presence_weights[z])});
    }
    csv::write_matrix_long(dir / "avail_history.csv", ds.avail_history, "vehicles");
    {
        csv::Writer w(dir / "events.csv");
        w.raw_line("zone_id,epoch_seconds");
        for (size_t z = 0; z < ds.events.size(); ++z)
            for (double slot : ds.events[z])
                w.row({std::to_string(z), csv::fmt(slot * 86400.0 / ds.activity.cols, 3)});
    }
    std::ofstream toml(dir / "run.toml");
    toml << "[data]\n"
         << "trips = \"trips.csv\"\nactivity = \"activity.csv\"\ntravel = \"travel.csv\"\n"
         << "presence = \"presence.csv\"\navail_history = \"avail_history.csv\"\n"
         << "events = \"events.csv\"\n"
         << "zones = " << ds.activity.rows << "\nslots = " << ds.activity.cols << "\n\n"
         << "[model]\nhorizon = " << ds.activity.cols << "\nfleet = " << fleet
         << "\nstaff = " << staff << "\ndelta = " << delta << "\n\n"
         << "[policy]\nkind = \"ranking\"\nw_tt = 0.07\nw_d = 280.32\nr_th = -17.35\nh = 2\n"
         << "predictor = \"last\"\ndemand_predictor = \"lambda\"\n\n"
         << "[run]\nscenarios = 1000\nseed = " << seed << "\nthreads = 0\nout = \"out\"\n";
}

void write_summary_json(const fs::path& path, const sim::SaaResult& res, long fleet, long staff,
                        const std::string& policy) {
    nlohmann::json j;
    j["policy"] = policy;
    j["fleet"] = fleet;
    j["staff"] = staff;
    j["scenarios"] = res.per_scenario.size();
    j["mean_trip_time_h"] = res.mean_score;
    j["std_trip_time_h"] = res.std_score;
    double trips = 0, reloc = 0, transits = 0, conflicts = 0, unmet = 0;
    for (const auto& m : res.per_scenario) {
        trips += static_cast<double>(m.trips);
        reloc += static_cast<double>(m.relocations);
        transits += static_cast<double>(m.transits);
        conflicts += static_cast<double>(m.conflicts);
        unmet += static_cast<double>(m.unmet_demand);
    }
    const double n = static_cast<double>(res.per_scenario.size());
    j["mean_trips"] = trips / n;
    j["mean_relocations"] = reloc / n;
    j["mean_transits"] = transits / n;
    j["mean_conflicts"] = conflicts / n;
    j["mean_unmet_demand"] = unmet / n;
    j["budget_exceeded"] = res.budget_exceeded;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"staff-based vehicle relocation toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config, "TOML run configuration")->envname("RELO_CONFIG");
    app.add_option("--seed", g.seed, "override run.seed")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_option("--out", g.out, "override run.out directory");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--scenarios", g.scenarios, "override run.scenarios");

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    synth::SyntheticSpec gspec;
    long gen_fleet = 300, gen_staff = 7;
    std::string gen_level = "zone";
    gen->add_option("--level", gen_level, "zone or cell")->check(CLI::IsMember({"zone", "cell"}));
    gen->add_option("--zones", gspec.zones, "zone count (zone level)");
    gen->add_option("--daily-demand", gspec.daily_demand, "expected demand per day");
    gen->add_option("--delta", gspec.delta_target, "activity-to-trips ratio");
    gen->add_option("--decay", gspec.decay_exponent, "gravity decay exponent");
    gen->add_option("--history-days", gspec.history_days, "availability history length");
    gen->add_option("--fleet", gen_fleet, "fleet size written into run.toml");
    gen->add_option("--staff", gen_staff, "staff size written into run.toml");
    synth::CellSpec cspec;
    gen->add_option("--radius", cspec.polygon_radius_m, "service polygon radius (cell level)");
    gen->add_option("--side", cspec.side_m, "hexagon side in meters (cell level)");
    gen->add_option("--band-width", cspec.band_width_m, "pattern stripe height (cell level)");

    // ---- zone ----
    auto* zone = app.add_subcommand("zone", "cluster hexagons into service zones");
    std::string z_polygon, z_roads, z_cars, z_acts, z_roadlen, z_grid_in;
    double z_side = 250, z_eps = 500;
    int z_minpts = 3;
    zoning::ClusterOptions zopt;
    zone->add_option("--polygon", z_polygon, "service area GeoJSON polygon");
    zone->add_option("--grid", z_grid_in, "pre-built grid CSV (skips tessellation)");
    zone->add_option("--roads", z_roads, "road edge list CSV")->required();
    zone->add_option("--car-series", z_cars, "per-cell car counts, long CSV")->required();
    zone->add_option("--act-series", z_acts, "per-cell activity counts, long CSV")->required();
    zone->add_option("--road-length", z_roadlen, "per-cell road meters CSV");
    zone->add_option("--side", z_side, "hexagon side in meters");
    zone->add_option("--eps", z_eps, "DBSCAN radius in meters");
    zone->add_option("--min-pts", z_minpts, "DBSCAN density threshold");
    zone->add_option("--max-size", zopt.max_size, "maximum cells per zone");
    zone->add_option("--w-rd", zopt.weights.w_rd, "road distance weight");
    zone->add_option("--w-dns", zopt.weights.w_dns, "road density weight");
    zone->add_option("--w-sh", zopt.weights.w_sh, "shape weight");
    zone->add_option("--w-cars", zopt.weights.w_cars, "car pattern weight");
    zone->add_option("--w-act", zopt.weights.w_act, "activity pattern weight");

    // ---- validate-zones ----
    auto* vz = app.add_subcommand("validate-zones", "availability prediction quality per zone");
    std::string v_zones, v_series;
    int v_cells = 0, v_len = 0, v_window = 672;
    std::string v_horizons = "3,6";
    double v_strength = 1.0;
    vz->add_option("--zones-csv", v_zones, "cell_id,zone_id partition")->required();
    vz->add_option("--cell-series", v_series, "per-cell availability history, long CSV")
        ->required();
    vz->add_option("--cells", v_cells, "cell count")->required();
    vz->add_option("--length", v_len, "series length in slots")->required();
    vz->add_option("--window", v_window, "autoregression window");
    vz->add_option("--horizons", v_horizons, "comma-separated horizons in slots");
    vz->add_option("--strength", v_strength, "l1 penalty strength");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "build the demand intensity tensor");
    std::string cal_candidates;
    cal->add_option("--delta-candidates", cal_candidates, "scaling factors to score");

    // ---- simulate ----
    auto* simc = app.add_subcommand("simulate", "run an SAA batch with the configured policy");
    bool sim_dump_decisions = false;
    int sim_dump_scenario = -1;
    bool sim_check_conservation = false;
    simc->add_flag("--dump-decisions", sim_dump_decisions, "write scenario 0 decision log");
    simc->add_option("--dump-scenario", sim_dump_scenario, "write scenario K as JSON");
    simc->add_flag("--check-conservation", sim_check_conservation,
                   "verify vehicle and staff conservation every slot");

    // ---- tune ----
    auto* tunec = app.add_subcommand("tune", "search relocation hyperparameters");
    harness::TuneOptions topt;
    std::string t_strategy = "coordinate-refine";
    tunec->add_option("--trials", topt.budget, "evaluation budget");
    tunec->add_option("--scenarios-per-trial", topt.scenarios_per_trial,
                      "common-random-number batch size");
    tunec->add_option("--strategy", t_strategy, "random or coordinate-refine")
        ->check(CLI::IsMember({"random", "coordinate-refine"}));

    // ---- benchmarks ----
    auto* bstaff = app.add_subcommand("bench-staff", "staff-size sweep");
    std::string bs_range = "0:20";
    bstaff->add_option("--staff-range", bs_range, "e.g. 0:20 or 0,5,10");

    auto* bzone = app.add_subcommand("bench-zoning", "zoning impact vs geometric clusterers");
    harness::ZoningImpactOptions zi;
    bzone->add_option("--radius", zi.cells.polygon_radius_m, "cell polygon radius");
    bzone->add_option("--band-width", zi.cells.band_width_m, "pattern stripe height");
    bzone->add_option("--max-size", zi.zoning_options.max_size, "zoning size cap");
    bzone->add_option("--fleet", zi.fleet, "fleet size");
    bzone->add_option("--staff", zi.staff, "staff size");

    auto* bpred = app.add_subcommand("bench-predictors", "availability predictor comparison");
    std::string bp_list = "last,ma4,ma6,linear-l1,linear-l2";
    int bp_window = 672;
    bpred->add_option("--predictors", bp_list, "comma-separated kinds");
    bpred->add_option("--window", bp_window, "linear predictor window");

    auto* bmip = app.add_subcommand("bench-mip", "greedy ranking vs per-step exact optimization");
    double bm_budget = 50.0;
    bmip->add_option("--time-budget-ms", bm_budget, "per-solve budget");

    auto* bscale = app.add_subcommand("bench-scale", "policy decision time vs zone count");
    std::string sc_zones = "20,45,90,180,365", sc_staff = "3,10,20";
    int sc_scenarios = 100;
    bscale->add_option("--zone-counts", sc_zones, "comma-separated zone counts");
    bscale->add_option("--staff-sizes", sc_staff, "comma-separated staff sizes");
    bscale->add_option("--bench-scenarios", sc_scenarios, "scenarios per configuration");

    // ---- export-lp ----
    auto* lp = app.add_subcommand("export-lp", "write the full-horizon model in LP format");
    std::string lp_scenario_file, lp_out = "model.lp";
    bool lp_solve = false;
    double lp_budget = 10000.0;
    lp->add_option("--scenario", lp_scenario_file, "scenario JSON (sampled when absent)");
    lp->add_option("--lp-out", lp_out, "output file name");
    lp->add_flag("--solve", lp_solve, "solve the model with the built-in exact solver");
    lp->add_option("--time-budget-ms", lp_budget, "solver budget when --solve is set");

    for (auto* sub : {gen, zone, vz, cal, simc, tunec, bstaff, bzone, bpred, bmip, bscale, lp})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (g.seed_set) gspec.seed = g.seed;
            cspec.seed = gspec.seed;
            const fs::path out = g.out.empty() ? fs::path("data") : fs::path(g.out);
            fs::create_directories(out);
            if (gen_level == "zone") {
                const auto ds = synth::generate_zone_dataset(gspec);
                write_instance_files(ds, out, gen_fleet, gen_staff, gspec.delta_target, gspec.seed);
            } else {
                const auto ds = synth::generate_cell_dataset(cspec);
                hex::write_grid_csv(out / "grid.csv", ds.grid);
                {
                    csv::Writer w(out / "roads.csv");
                    w.raw_line("node_a_x,node_a_y,node_b_x,node_b_y,length_m");
                    for (size_t a = 0; a < ds.roads.adj.size(); ++a)
                        for (auto [b, len] : ds.roads.adj[a])
                            if (static_cast<int>(a) < b)
                                w.row({csv::fmt(ds.roads.nodes[a].x), csv::fmt(ds.roads.nodes[a].y),
                                       csv::fmt(ds.roads.nodes[b].x), csv::fmt(ds.roads.nodes[b].y),
                                       csv::fmt(len)});
                }
                csv::write_matrix_long(out / "cell_car_series.csv", ds.attrs.car_series, "cars");
                csv::write_matrix_long(out / "cell_act_series.csv", ds.attrs.act_series, "events");
                csv::write_matrix_long(out / "cell_car_history.csv", ds.car_history, "cars");
                {
                    csv::Writer w(out / "cell_road_length.csv");
                    w.raw_line("cell_id,road_m");
                    for (size_t c = 0; c < ds.attrs.road_length.size(); ++c)
                        w.row({std::to_string(c), csv::fmt(ds.attrs.road_length[c])});
                }
            }
            return kExitOk;
        }

        if (zone->parsed()) {
            hex::HexGrid grid;
            if (!z_grid_in.empty()) {
                grid = hex::read_grid_csv(z_grid_in, z_side);
            } else {
                if (z_polygon.empty())
                    throw CLI::ValidationError("zone: provide --polygon or --grid");
                const auto ring = hex::read_geojson_polygon(z_polygon);
                grid = hex::filter_to_core(hex::tessellate(ring, z_side), z_eps, z_minpts);
            }
            const auto roads = hex::read_road_graph_csv(z_roads, grid);
            zoning::CellAttributes attrs;
            const int C = grid.size();
            // series length inferred from max t in the car series file
            int P = 0;
            for (const auto& r : csv::read_rows(z_cars)) P = std::max(P, std::stoi(r[1]));
            attrs.car_series = csv::read_matrix_long(z_cars, C, P);
            attrs.act_series = csv::read_matrix_long(z_acts, C, P);
            attrs.road_length.assign(C, 0.0);
            if (!z_roadlen.empty())
                for (const auto& r : csv::read_rows(z_roadlen))
                    attrs.road_length.at(std::stoul(r[0])) = std::stod(r[1]);
            const auto zr = zoning::agglomerative_cluster(grid, attrs, roads, zopt);
            const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
            fs::create_directories(out);
            hex::write_grid_csv(out / "grid.csv", grid);
            zoning::write_zones_csv(out / "zones.csv", zr);
            zoning::write_zone_summary_json(out / "zones.json", zr);
            std::printf("zones: %zu (from %d cells)\n", zr.zones.size(), C);
            return kExitOk;
        }

        if (vz->parsed()) {
            std::vector<int> zone_of(v_cells, -1);
            int zones = 0;
            for (const auto& r : csv::read_rows(v_zones)) {
                const int cell = std::stoi(r[0]);
                const int z = std::stoi(r[1]);
                zone_of.at(cell) = z;
                zones = std::max(zones, z + 1);
            }
            const Matrix cell_series = csv::read_matrix_long(v_series, v_cells, v_len);
            Matrix zone_series(zones, v_len, 0.0);
            for (int c = 0; c < v_cells; ++c) {
                if (zone_of[c] < 0) continue;
                for (int t = 0; t < v_len; ++t)
                    zone_series.at(zone_of[c], t) += cell_series.at(c, t);
            }
            std::vector<int> horizons;
            for (const auto& f : csv::split_line(v_horizons, ',')) horizons.push_back(std::stoi(f));
            const auto vs = zoning::validate_zoning(zone_series, horizons, v_window, v_strength);
            const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
            fs::create_directories(out);
            zoning::write_validation_csv(out / "validation.csv", vs);
            for (const auto& agg : vs.aggregates)
                std::printf("horizon %d: mean r2 %.4f (std %.4f, median %.4f) over %d zones\n",
                            agg.horizon, agg.mean_r2, agg.std_r2, agg.median_r2, agg.zones_scored);
            return kExitOk;
        }

        if (cal->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            csv::write_tensor(rc.out / "lambda.csv", inst.lambda.values, "lambda");
            double alpha = 0.0;
            {
                const MaskedTensor3 raw = csv::read_tensor(rc.trips, rc.zones, rc.zones, rc.slots);
                demand::smooth_trips(raw.values, &alpha);
                nlohmann::json j;
                j["alpha"] = alpha;
                j["delta"] = rc.delta;
                j["trips_fill_rate"] = raw.fill_rate();
                j["lambda_total_per_day"] = inst.lambda.values.sum();
                std::ofstream outp(rc.out / "calibration.json");
                outp << j.dump(2) << "\n";
            }
            if (!cal_candidates.empty()) {
                const MaskedTensor3 raw = csv::read_tensor(rc.trips, rc.zones, rc.zones, rc.slots);
                const Matrix act = csv::read_matrix_long(rc.activity, rc.zones, rc.slots);
                std::vector<double> trips_total(rc.slots, 0.0), act_total(rc.slots, 0.0);
                for (int t = 0; t < rc.slots; ++t) {
                    for (int i = 0; i < rc.zones; ++i) {
                        act_total[t] += act.at(i, t);
                        for (int j = 0; j < rc.zones; ++j)
                            trips_total[t] += raw.values.at(i, j, t);
                    }
                }
                const auto table =
                    demand::select_delta(act_total, trips_total, parse_doubles(cal_candidates));
                csv::Writer w(rc.out / "delta_selection.csv");
                w.raw_line("delta,r2,dtw");
                for (const auto& row : table)
                    w.row({csv::fmt(row.delta),
                           row.r2 ? csv::fmt(*row.r2) : std::string("missing"),
                           csv::fmt(row.dtw)});
            }
            return kExitOk;
        }

        if (simc->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            sim::RunOptions opt;
            opt.check_conservation = sim_check_conservation;
            const auto res =
                harness::run_batch(inst, rc.policy, rc.scenarios, rc.seed, rc.threads, opt);
            sim::write_metrics_csv(rc.out / "metrics.csv", res.per_scenario, rc.policy.name(),
                                   rc.seed);
            write_summary_json(rc.out / "summary.json", res, inst.fleet, inst.staff,
                               rc.policy.name());
            if (sim_check_conservation && res.conservation_violations > 0) {
                std::fprintf(stderr, "conservation violations: %ld\n",
                             res.conservation_violations);
                return kExitData;
            }
            if (sim_dump_decisions || sim_dump_scenario >= 0) {
                demand::ScenarioSampler sampler(inst.lambda, inst.presence);
                const int k = std::max(0, sim_dump_scenario);
                const auto sc = sampler.sample(inst.fleet, inst.staff, derive(rc.seed, k));
                if (sim_dump_scenario >= 0)
                    demand::write_scenario_json(rc.out / "scenario.json", sc);
                if (sim_dump_decisions) {
                    sim::SimInputs in;
                    in.travel = &inst.travel;
                    in.horizon = inst.horizon;
                    const auto factory = harness::make_policy_factory(rc.policy, inst);
                    auto pol = factory ? factory() : nullptr;
                    const auto run = sim::run_scenario(sc, in, pol.get());
                    sim::write_decision_log_csv(rc.out / "decisions.csv", run.log);
                }
            }
            std::printf("mean trip time: %.4f h (std %.4f) over %d scenarios\n", res.mean_score,
                        res.std_score, rc.scenarios);
            return res.budget_exceeded ? kExitBudget : kExitOk;
        }

        if (tunec->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            topt.seed = rc.seed;
            topt.threads = rc.threads;
            topt.policy = rc.policy;
            topt.strategy = t_strategy == "random" ? tune::Strategy::random
                                                   : tune::Strategy::coordinate_refine;
            const auto res = harness::tune_instance(inst, topt);
            tune::write_history_csv(rc.out / "tuning_history.csv", res);
            nlohmann::json j;
            j["w_tt"] = res.best.params.w_tt;
            j["w_d"] = res.best.params.w_d;
            j["r_th"] = res.best.params.r_th;
            j["objective"] = res.best.objective.value;
            j["relocations"] = res.best.objective.relocations;
            j["transits"] = res.best.objective.transits;
            std::ofstream out(rc.out / "tuned_params.json");
            out << j.dump(2) << "\n";
            std::printf("best: w_tt=%.5f w_d=%.3f r_th=%.3f objective=%.3f\n",
                        res.best.params.w_tt, res.best.params.w_d, res.best.params.r_th,
                        res.best.objective.value);
            return kExitOk;
        }

        if (bstaff->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            const auto rows = harness::staff_sweep(inst, parse_range(bs_range), rc.policy,
                                                   rc.scenarios, rc.seed, rc.threads);
            harness::write_staff_sweep_csv(rc.out / "staff_sweep.csv", rows);
            return kExitOk;
        }

        if (bzone->parsed()) {
            if (g.seed_set) zi.seed = g.seed;
            if (g.scenarios > 0) zi.scenarios = g.scenarios;
            zi.threads = effective_threads(g.threads);
            zi.cells.seed = zi.seed;
            const auto rows = harness::zoning_impact(zi);
            const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
            fs::create_directories(out);
            harness::write_zoning_impact_csv(out / "zoning_impact.csv", rows);
            for (const auto& r : rows)
                std::printf("%-12s zones=%d dt=%.2f%% dn=%.2f%%\n", r.method.c_str(), r.zones,
                            r.dt_pct, r.dn_pct);
            return kExitOk;
        }

        if (bpred->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            std::vector<harness::PolicySpec> specs;
            for (const auto& name : csv::split_line(bp_list, ',')) {
                harness::PolicySpec s = rc.policy;
                s.kind = harness::PolicyKind::ranking;
                if (name == "last") {
                    s.availability.kind = pred::AvailabilityKind::last;
                } else if (name.rfind("ma", 0) == 0) {
                    s.availability.kind = pred::AvailabilityKind::moving_average;
                    s.availability.window = std::stoi(name.substr(2));
                } else if (name == "linear-l1") {
                    s.availability.kind = pred::AvailabilityKind::linear_l1;
                    s.availability.window = bp_window;
                } else if (name == "linear-l2") {
                    s.availability.kind = pred::AvailabilityKind::linear_l2;
                    s.availability.window = bp_window;
                } else {
                    throw CLI::ValidationError("unknown predictor: " + name);
                }
                s.availability.horizon = s.params.h;
                specs.push_back(s);
            }
            const auto rows = harness::predictor_bench(inst, specs, rc.scenarios, rc.seed,
                                                       rc.threads, rc.out);
            harness::write_predictor_bench_csv(rc.out / "predictor_bench.csv", rows);
            return kExitOk;
        }

        if (bmip->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            harness::PolicySpec ranking = rc.policy;
            ranking.kind = harness::PolicyKind::ranking;
            harness::PolicySpec mipspec = rc.policy;
            mipspec.kind = harness::PolicyKind::local_mip;
            mipspec.mip_budget_ms = bm_budget;
            const auto res =
                harness::compare_mip(inst, ranking, mipspec, rc.scenarios, rc.seed, rc.threads);
            harness::write_compare_mip_csv(rc.out / "compare_mip.csv", res);
            for (const auto& r : res.rows)
                std::printf("%-10s t=%.2f h (%+.2f%%) n=%.1f reloc=%.1f transits=%.1f%s\n",
                            r.algorithm.c_str(), r.t_mean, r.dt_pct, r.n_mean, r.relocations,
                            r.transits, r.budget_flagged ? " [budget]" : "");
            return kExitOk;
        }

        if (bscale->parsed()) {
            harness::ScalabilityOptions so;
            so.zone_counts.clear();
            for (long v : parse_range(sc_zones)) so.zone_counts.push_back(static_cast<int>(v));
            so.staff_sizes = parse_range(sc_staff);
            so.scenarios = sc_scenarios;
            if (g.seed_set) so.seed = g.seed;
            so.threads = effective_threads(g.threads);
            so.base.seed = so.seed;
            so.policy.kind = harness::PolicyKind::ranking;
            const auto rows = harness::scalability(so);
            const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
            fs::create_directories(out);
            harness::write_scalability_csv(out / "scalability.csv", rows);
            for (const auto& r : rows)
                std::printf("zones=%d staff=%ld mean=%.6f s std=%.6f s\n", r.zones, r.staff,
                            r.mean_seconds, r.std_seconds);
            return kExitOk;
        }

        if (lp->parsed()) {
            const auto rc = load_config_or_exit(g);
            const auto inst = cfg::load_instance(rc);
            demand::Scenario sc;
            if (!lp_scenario_file.empty()) {
                sc = demand::read_scenario_json(lp_scenario_file);
            } else {
                demand::ScenarioSampler sampler(inst.lambda, inst.presence);
                sc = sampler.sample(inst.fleet, inst.staff, derive(rc.seed, 0));
            }
            const auto ip =
                mip::build_full_model(sc, inst.travel, inst.horizon, inst.fleet, inst.staff);
            std::ofstream out(rc.out / lp_out);
            out << mip::export_lp(ip);
            out.close();
            std::printf("model: %zu variables, %zu constraints -> %s\n", ip.vars.size(),
                        ip.constraints.size(), (rc.out / lp_out).string().c_str());
            if (lp_solve) {
                const auto sol = mip::solve_exact(ip, lp_budget);
                nlohmann::json j;
                j["status"] = sol.status == mip::IPSolution::Status::optimal ? "optimal"
                              : sol.status == mip::IPSolution::Status::infeasible
                                  ? "infeasible"
                                  : "budget_exceeded";
                j["objective_h"] = sol.objective;
                std::ofstream sj(rc.out / "lp_solution.json");
                sj << j.dump(2) << "\n";
                if (sol.status == mip::IPSolution::Status::budget_exceeded) return kExitBudget;
            }
            return kExitOk;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.rfind("config", 0) == 0) {
            std::fprintf(stderr, "%s\n", what.c_str());
            return kExitConfig;
        }
        std::fprintf(stderr, "data error: %s\n", what.c_str());
        return kExitData;
    }
    return kExitOk;
}
