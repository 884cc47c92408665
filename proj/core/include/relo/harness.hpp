#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "relo/clusterers.hpp"
#include "relo/localmip.hpp"
#include "relo/predictors.hpp"
#include "relo/relocation.hpp"
#include "relo/sim.hpp"
#include "relo/synthetic.hpp"
#include "relo/tuning.hpp"

namespace relo::harness {

// A calibrated, ready-to-simulate problem instance.
struct Instance {
    demand::LambdaTensor lambda;
    demand::TravelTimeTensor travel;
    std::vector<double> presence;
    Matrix avail_history;
    std::vector<std::vector<double>> events;
    long fleet = 300;
    long staff = 7;
    int horizon = 96;

    int zones() const { return lambda.zones(); }
};

Instance make_instance(const synth::ZoneDataset& ds, long fleet, long staff, double delta);

enum class PolicyKind { none, ranking, local_mip };

struct PolicySpec {
    PolicyKind kind = PolicyKind::ranking;
    policy::RelocParams params;
    pred::PredictorConfig availability;  // last-observation by default
    pred::DemandMode demand_mode = pred::DemandMode::lambda_baseline;
    double kde_bandwidth = 4.0;
    double mip_budget_ms = 50.0;

    std::string name() const;
};

// Builds a per-scenario policy factory; linear availability predictors are
// fitted once on the instance history and shared.
sim::PolicyFactory make_policy_factory(const PolicySpec& spec, const Instance& inst);

sim::SaaResult run_batch(const Instance& inst, const PolicySpec& spec, int scenarios,
                         uint64_t seed, int threads, const sim::RunOptions& opt = {});

// --- staff-size sweep ---
struct StaffSweepRow {
    long staff = 0;
    double t_mean = 0, t_std = 0, dt_pct = 0;
    double n_mean = 0, n_std = 0, dn_pct = 0;
};
std::vector<StaffSweepRow> staff_sweep(Instance inst, const std::vector<long>& staff_sizes,
                                       const PolicySpec& spec, int scenarios, uint64_t seed,
                                       int threads);
void write_staff_sweep_csv(const std::filesystem::path& path,
                           const std::vector<StaffSweepRow>& rows);

// --- zoning impact ---
struct ZoningImpactRow {
    std::string method;
    int zones = 0;
    double n_random = 0, n_opt = 0, dn_pct = 0;
    double t_random = 0, t_opt = 0, dt_pct = 0;
    double relocations = 0, transits = 0, conflicts = 0;
};
struct ZoningImpactOptions {
    synth::CellSpec cells;
    zoning::ClusterOptions zoning_options{.weights = {}, .max_size = 8};
    long fleet = 40;
    long staff = 3;
    // ranking parameters sized for the small aggregated instances
    policy::RelocParams params{.w_tt = 0.05, .w_d = 10.0, .r_th = -2.0, .h = 2};
    int scenarios = 200;
    uint64_t seed = 1;
    int threads = 1;
};
std::vector<ZoningImpactRow> zoning_impact(const ZoningImpactOptions& opt);
void write_zoning_impact_csv(const std::filesystem::path& path,
                             const std::vector<ZoningImpactRow>& rows);

// --- predictor benchmark ---
struct PredictorBenchRow {
    std::string name;
    double r2 = 0;  // mean over zones on held-out history
    double trips = 0, trip_time = 0, relocations = 0, transits = 0, conflicts = 0;
};
// Writes fitted linear coefficients to coef_dir when given (one CSV per
// predictor, rows zone_id,w0,w1,...).
std::vector<PredictorBenchRow> predictor_bench(const Instance& inst,
                                               const std::vector<PolicySpec>& predictors,
                                               int scenarios, uint64_t seed, int threads,
                                               const std::filesystem::path& coef_dir = {});
void write_predictor_bench_csv(const std::filesystem::path& path,
                               const std::vector<PredictorBenchRow>& rows);

// mean r2 of one availability predictor across zones, trained on the 70%
// prefix of the history and scored on the suffix
double history_r2(const pred::PredictorConfig& cfg, const Matrix& history);

// --- greedy vs local-MIP comparison ---
struct CompareMipResult {
    struct Row {
        std::string algorithm;
        double n_mean = 0, dn_pct = 0;
        double t_mean = 0, dt_pct = 0;
        double relocations = 0, transits = 0, conflicts = 0;
        bool budget_flagged = false;
    };
    std::vector<Row> rows;  // NoOpt, RB, MIP
    // per-scenario trip time per arm for paired analysis
    std::vector<double> noopt_scores, rb_scores, mip_scores;
};
CompareMipResult compare_mip(const Instance& inst, const PolicySpec& ranking,
                             const PolicySpec& mip, int scenarios, uint64_t seed, int threads);
void write_compare_mip_csv(const std::filesystem::path& path, const CompareMipResult& res);

// --- scalability ---
struct ScalabilityRow {
    int zones = 0;
    long staff = 0;
    double mean_seconds = 0, std_seconds = 0;  // policy decision time per scenario
};
struct ScalabilityOptions {
    synth::SyntheticSpec base;        // generated once at max zone count
    std::vector<int> zone_counts;
    std::vector<long> staff_sizes;
    long fleet = 300;
    int scenarios = 100;
    uint64_t seed = 1;
    int threads = 1;
    PolicySpec policy;
};
std::vector<ScalabilityRow> scalability(const ScalabilityOptions& opt);
void write_scalability_csv(const std::filesystem::path& path,
                           const std::vector<ScalabilityRow>& rows);

// --- tuning orchestration (common random numbers across trials) ---
struct TuneOptions {
    tune::SearchSpace space;
    int budget = 200;
    tune::Strategy strategy = tune::Strategy::coordinate_refine;
    int scenarios_per_trial = 12;
    uint64_t seed = 1;
    int threads = 1;
    PolicySpec policy;  // params field is overwritten per trial
};
tune::SearchResult tune_instance(const Instance& inst, const TuneOptions& opt);

}  // namespace relo::harness
