#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relo/demand.hpp"
#include "relo/tensor.hpp"

namespace relo::sim {

// Mutable per-scenario state. Slot indices are 1-based; arrival queues are
// sized to hold everything scheduled past the horizon so conservation can
// be checked exactly.
struct SimState {
    int t = 0;
    std::vector<long> x_v;  // idle vehicles per zone
    std::vector<long> x_s;  // idle staff per zone
    std::vector<std::vector<long>> arrivals_v;       // [slot][zone]
    std::vector<std::vector<long>> arrivals_s;       // [slot][zone]
    std::vector<std::vector<long>> pending_intent;   // staff arriving intending to relocate

    int zones() const { return static_cast<int>(x_v.size()); }
    int max_slot() const { return static_cast<int>(arrivals_v.size()) - 1; }

    // schedules arrivals, clamping the slot into the queue range
    void schedule_vehicles(int slot, int zone, long count = 1) {
        arrivals_v[std::min(slot, max_slot())][zone] += count;
    }
    void schedule_staff(int slot, int zone, bool intent, long count = 1) {
        const int s = std::min(slot, max_slot());
        arrivals_s[s][zone] += count;
        if (intent) pending_intent[s][zone] += count;
    }

    long idle_vehicles() const;
    long idle_staff() const;
    long scheduled_vehicles(int after_slot) const;
    long scheduled_staff(int after_slot) const;
};

struct DecisionLog {
    using Key = std::array<int, 3>;  // i, j, t (t 1-based)
    std::map<Key, long> trips;        // u_v
    std::map<Key, long> relocations;  // u_r
    std::map<Key, long> transits;     // u_t
};

struct Metrics {
    long trips = 0;
    double trip_time = 0.0;  // hours
    long relocations = 0;
    double reloc_time = 0.0;
    long transits = 0;
    double transit_time = 0.0;
    long conflicts = 0;
    long unmet_demand = 0;
};

// Total scored trip time in hours: sum of u_v counts times the
// horizon-clamped travel time.
double score(const DecisionLog& log, const demand::TravelTimeTensor& T, int H);

Metrics compute_metrics(const DecisionLog& log, const demand::TravelTimeTensor& T, int H);

struct SimInputs {
    const demand::TravelTimeTensor* travel = nullptr;
    int horizon = 96;
    std::vector<int> zone_stream_ids;  // assignment stream remap; identity when empty
};

// A relocation policy plugged into the slot loop. decide() runs after
// client assignment and mutates state (departures, scheduled arrivals) and
// the decision log.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string id() const = 0;
    virtual void begin_scenario(const SimInputs& in, const demand::Scenario& sc) = 0;
    virtual void decide(SimState& state, DecisionLog& log, int t) = 0;
    virtual bool budget_exceeded() const { return false; }
};

// Samples k = min(vehicles, waiting demand) individual demands without
// replacement from the destination multiset. Returns served counts per
// destination. `visit` fixes the draw order over destinations (identity
// when empty) so relabeled problems stay equivariant.
std::vector<long> sample_assignments(std::span<const long> demand_row, long vehicles, Rng& rng,
                                     std::span<const int> visit = {});

// One assignment step for zone-by-zone client service at slot t:
// materializes due arrivals, samples departures, schedules trip arrivals.
void step_assignment(SimState& state, const demand::Scenario& sc, const SimInputs& in, int t,
                     DecisionLog& log, Metrics& metrics);

struct RunOptions {
    bool check_conservation = false;
    bool time_policy = false;
};

struct RunResult {
    Metrics metrics;
    DecisionLog log;
    long conservation_violations = 0;
    double policy_seconds = 0.0;
    bool budget_exceeded = false;
};

RunResult run_scenario(const demand::Scenario& sc, const SimInputs& in, Policy* policy,
                       const RunOptions& opt = {});

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

struct SaaResult {
    double mean_score = 0.0;  // mean client trip time, hours
    double std_score = 0.0;
    std::vector<Metrics> per_scenario;
    std::vector<double> policy_seconds;
    long conservation_violations = 0;
    bool budget_exceeded = false;
};

// Runs n scenarios with seeds derived from `seed`; scenario i is fully
// independent of execution order, so workers can process them in parallel.
SaaResult run_saa(const demand::ScenarioSampler& sampler, int n, const PolicyFactory& make_policy,
                  long fleet, long staff, uint64_t seed, const SimInputs& in, int threads = 1,
                  const RunOptions& opt = {});

// Exports.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<Metrics>& rows,
                       const std::string& policy_id, uint64_t base_seed);
void write_decision_log_csv(const std::filesystem::path& path, const DecisionLog& log);

}  // namespace relo::sim
