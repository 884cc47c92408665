#pragma once

#include <vector>

#include "relo/demand.hpp"
#include "relo/hexgrid.hpp"
#include "relo/tensor.hpp"
#include "relo/zoning.hpp"

namespace relo::synth {

// Zone-level synthetic dataset. Stands in for operator data: a disc-shaped
// city with central attractors, bimodal rush-hour activity, morning flows
// toward the center and evening flows back out.
struct SyntheticSpec {
    int zones = 63;
    int slots = 96;
    double daily_demand = 1100.0;      // expected trip opportunities per day
    double delta_target = 15.0;        // activity-to-trips ratio
    double decay_exponent = 1.0;       // flow ~ distance^-exponent
    double attraction_bias = 0.35;     // directional rush-hour share
    double city_radius_m = 7000.0;
    double mean_speed_kmh = 24.0;
    double activity_noise = 0.04;
    int history_days = 28;             // availability history length
    uint64_t seed = 1;
};

struct ZoneDataset {
    Tensor3 trips;     // average daily trips per (i, j, slot)
    Matrix activity;   // average interactions per (i, slot)
    demand::TravelTimeTensor travel;
    std::vector<geo::Point> centroids;
    std::vector<double> presence_weights;  // initial-vehicle placement weights
    Matrix avail_history;                  // zones x (history_days * slots)
    std::vector<std::vector<double>> events;  // interaction slot positions per zone
};

// flow attenuation by distance: (1 km / d)^exponent with a floor on d
double distance_decay(double meters, double exponent);

ZoneDataset generate_zone_dataset(const SyntheticSpec& spec);

// Cell-level synthetic dataset for the zoning pipeline: a hex grid whose
// cells carry planted temporal patterns laid out in spatial bands, so
// pattern-aware zoning can separate what geometry-only clustering mixes.
struct CellSpec {
    double polygon_radius_m = 2400.0;
    double side_m = 250.0;
    int slots = 96;
    double band_width_m = 370.0;      // stripe height of alternating patterns (one hex row)
    double daily_demand = 420.0;
    double delta_target = 15.0;
    double pattern_contrast = 6.0;    // series amplitude between patterns
    double jitter = 0.05;
    double mean_speed_kmh = 22.0;
    int history_days = 14;            // multi-day car history length
    uint64_t seed = 1;
};

struct CellDataset {
    hex::HexGrid grid;
    hex::RoadGraph roads;
    zoning::CellAttributes attrs;   // per-cell series and road lengths
    std::vector<int> pattern_of;    // planted pattern per cell
    // factored flow model: flow(c,d,t) = origin[c][t] * attract[d][t] * decay(c,d)
    Matrix origin_rate;   // cells x slots
    Matrix attract_rate;  // cells x slots
    std::vector<double> cell_jitter;
    Matrix car_history;   // cells x (history_days * slots), noisy daily repeats
};

CellDataset generate_cell_dataset(const CellSpec& spec);

// Aggregates the cell flow model onto a partition, producing a zone-level
// dataset (travel times from zone centroids, activity from flow row sums).
ZoneDataset aggregate_cells(const CellDataset& cells, const std::vector<int>& zone_of,
                            int zone_count, const CellSpec& spec);

}  // namespace relo::synth
