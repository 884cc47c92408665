#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "relo/hexgrid.hpp"
#include "relo/tensor.hpp"

namespace relo::zoning {

// One cluster of hexagonal cells plus the attributes the distance function
// compares: road density, centroid, and the two day-aggregated series
// (available cars, user interactions) in 15-minute slots.
struct Cluster {
    std::vector<int> members;  // sorted cell ids
    geo::Point centroid;
    double road_length = 0.0;  // total meters of road across members
    std::vector<double> car_series;
    std::vector<double> act_series;

    int size() const { return static_cast<int>(members.size()); }
    double road_density() const { return road_length / std::max(1, size()); }
};

struct DistanceWeights {
    double w_rd = 2.0;
    double w_dns = 1.0;
    double w_sh = 1.0;
    double w_cars = 1.0;
    double w_act = 1.0;
};

// Component order: road, density, shape, cars, activity.
using Components = std::array<double, 5>;

// Raw per-cell inputs for clustering.
struct CellAttributes {
    std::vector<double> road_length;     // meters of road per cell
    Matrix car_series;                   // cells x P
    Matrix act_series;                   // cells x P
};

struct ZoningResult {
    std::vector<Cluster> zones;
    std::vector<int> zone_of;  // cell id -> zone index
    int max_size = 0;
    std::vector<double> merge_trace;  // distance at each regular merge
};

// Pairwise component distances between disjoint clusters. d_rd is single
// linkage over adjacent cross pairs (infinity when none); d_dns compares
// road densities; d_sh is the Ward term; the series distances use DTW.
Components component_distances(const Cluster& a, const Cluster& b, const hex::HexGrid& grid,
                               const hex::RoadGraph& roads);

// Divides finite entries by the max finite entry, preserving infinities.
// Throws when no entry is finite.
void normalize_component(std::vector<double>& entries);

// True when B is sealed off by A: every lattice neighbor of every B cell is
// in A or B. Cells on the grid edge (fewer than 6 lattice neighbors) make
// this false.
bool contains(const Cluster& a, const Cluster& b, const hex::HexGrid& grid);

struct ClusterOptions {
    DistanceWeights weights;
    int max_size = 25;
    // When set, pair distance is plain single linkage over the initial
    // combined matrix for every component (test hook; yields a monotone
    // merge trace).
    bool single_linkage_all = false;
};

// Agglomerative clustering over the grid cells: repeatedly merges the
// closest mergeable pair (size cap, finite distance) and absorbs clusters
// fully surrounded by another.
ZoningResult agglomerative_cluster(const hex::HexGrid& grid, const CellAttributes& attrs,
                                   const hex::RoadGraph& roads, const ClusterOptions& opt);

// Zoning validation: per-zone autoregressive prediction quality.
struct ZoneScore {
    int zone = 0;
    int horizon = 0;
    bool skipped = false;  // degenerate (constant) target
    double r2 = 0, mse = 0, rmse = 0, maxe = 0, med = 0, mae = 0;
};

struct ValidationSummary {
    std::vector<ZoneScore> per_zone;
    // aggregate over non-skipped zones, per horizon: [metric] -> mean/std/median
    struct Aggregate {
        int horizon = 0;
        double mean_r2 = 0, std_r2 = 0, median_r2 = 0;
        double mean_mse = 0, mean_rmse = 0, mean_maxe = 0, mean_med = 0, mean_mae = 0;
        int zones_scored = 0;
        int zones_skipped = 0;
    };
    std::vector<Aggregate> aggregates;
};

// Trains an L1-regularized linear autoregressor per zone on the 70% prefix
// of each series and scores the 30% suffix at each horizon.
ValidationSummary validate_zoning(const Matrix& zone_series, const std::vector<int>& horizons,
                                  int window, double l1_strength = 1.0);

// Exports.
void write_zones_csv(const std::filesystem::path& path, const ZoningResult& zr);
void write_zone_summary_json(const std::filesystem::path& path, const ZoningResult& zr);
void write_validation_csv(const std::filesystem::path& path, const ValidationSummary& vs);

}  // namespace relo::zoning
