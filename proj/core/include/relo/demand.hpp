#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "relo/rng.hpp"
#include "relo/tensor.hpp"

namespace relo::demand {

constexpr double kSlotMinutes = 15.0;

// Poisson intensity per (origin, destination, slot), together with the
// calibration constants that produced it.
struct LambdaTensor {
    Tensor3 values;  // N x N x H
    double delta = 15.0;
    double alpha = 0.0;

    int zones() const { return values.n1; }
    int horizon() const { return values.n3; }
};

// Average trip durations in minutes per (origin, destination, slot).
struct TravelTimeTensor {
    Tensor3 values;  // N x N x P
    int horizon = 96;

    int zones() const { return values.n1; }
    int slots() const { return values.n3; }
    double at(int i, int j, int t) const { return values.at(i, j, t - 1); }  // 1-based slot
};

// Sampled demand plus initial placements; fully determined by the seed.
struct Scenario {
    std::vector<long> demand;  // N x N x H counts, same layout as Tensor3
    std::vector<long> vehicles0;
    std::vector<long> staff0;
    uint64_t seed = 0;
    int zones = 0;
    int horizon = 0;

    size_t idx(int i, int j, int t) const {
        return (static_cast<size_t>(i) * zones + j) * horizon + t;
    }
    long d(int i, int j, int t) const { return demand[idx(i, j, t - 1)]; }  // 1-based slot
};

// alpha = 0.1 * min positive entry, added everywhere. Throws on all-zero.
Tensor3 smooth_trips(const Tensor3& trips, double* alpha_out = nullptr);

// Lambda[i,j,t] = AC[i,t] / (delta * sum_j TR[i,j,t]) * TR[i,j,t]
LambdaTensor calibrate_lambda(const Tensor3& smoothed_trips, const Matrix& activity, double delta);

struct DeltaScore {
    double delta = 0.0;
    std::optional<double> r2;  // missing when the trips series has no variance
    double dtw = 0.0;
};

// Compares trips totals against activity totals scaled by each candidate
// delta. Selection stays with the caller.
std::vector<DeltaScore> select_delta(std::span<const double> activity_total,
                                     std::span<const double> trips_total,
                                     std::span<const double> candidates);

// Trip duration contributing to the score: clamped to the remaining
// horizon when the arrival slot would fall at or past H. Slot t is 1-based.
double effective_travel_time(const TravelTimeTensor& T, int i, int j, int t, int H);

// ceil(T/dt) slots, at least one
int duration_slots(double minutes);

// Fills gaps in a travel-time tensor: per-pair mean over slots first, then
// distance/speed when zone distances are given, then the global mean.
Tensor3 impute_travel_times(const MaskedTensor3& raw, const Matrix* zone_distances,
                            double mean_speed_m_per_min);

// Scenario sampling. Zone streams can be remapped (stream_ids) so that a
// relabeled problem reproduces relabeled draws; identity when empty.
class ScenarioSampler {
public:
    ScenarioSampler(const LambdaTensor& lambda, std::vector<double> presence_weights,
                    std::vector<int> stream_ids = {});

    Scenario sample(long fleet, long staff, uint64_t seed) const;

private:
    const LambdaTensor& lambda_;
    std::vector<double> exp_neg_;  // cached exp(-lambda), 0 where lambda >= 10
    std::vector<double> presence_;
    std::vector<int> stream_ids_;
    std::vector<int> placement_order_;  // zones sorted by stream id
};

// Scenario JSON round-trip (sparse demand triplets).
void write_scenario_json(const std::filesystem::path& path, const Scenario& sc);
Scenario read_scenario_json(const std::filesystem::path& path);

}  // namespace relo::demand
