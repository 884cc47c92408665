#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "relo/geometry.hpp"

namespace relo::hex {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HexCell {
    int id = -1;
    geo::Point center;
    double side = 0.0;
    std::vector<int> neighbor_ids;  // existing grid neighbors only, <= 6

    // Cells whose full 6-neighborhood exists do not touch the lattice
    // exterior; containment tests rely on this.
    bool interior() const { return neighbor_ids.size() == 6; }
};

struct HexGrid {
    std::vector<HexCell> cells;
    geo::Ring service_polygon;

    const HexCell& cell(int id) const { return cells[id]; }
    int size() const { return static_cast<int>(cells.size()); }
};

// Covers the polygon with a pointy-top hexagonal lattice anchored at the
// bounding-box corner and keeps cells whose center falls strictly inside.
// Throws on degenerate (zero-area) polygons.
HexGrid tessellate(const geo::Ring& polygon, double side);

struct DbscanResult {
    std::vector<int> labels;  // cluster id per point, -1 for noise
    int core_label = -1;      // largest cluster (ties: lowest label id)
};

// Classic DBSCAN with Euclidean eps-neighborhoods (a point counts in its
// own neighborhood). Throws on empty input.
DbscanResult dbscan_filter(const std::vector<geo::Point>& points, double eps, int min_pts);

// Keeps only the cells of the largest DBSCAN cluster of cell centers and
// reindexes ids densely.
HexGrid filter_to_core(const HexGrid& grid, double eps, int min_pts);

struct RoadGraph {
    std::vector<geo::Point> nodes;
    // undirected adjacency: per node, (neighbor node, length in meters)
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::unordered_map<int, int> cell_anchor;  // cell id -> nearest node

    void add_edge(int a, int b, double length);
    // anchor = node nearest to each cell center (Euclidean)
    void anchor_cells(const HexGrid& grid);
};

// Shortest-path distance between the cells' anchor nodes; infinity when the
// anchors live in disconnected components. With adjacency_only set, cells
// that are not grid neighbors get infinity without running a search.
double road_distance(const HexCell& a, const HexCell& b, const RoadGraph& g,
                     bool adjacency_only = false);

// Builds a road graph that mirrors the grid: one node per cell center, one
// edge per neighbor link. Used by synthetic pipelines.
RoadGraph lattice_road_graph(const HexGrid& grid);

// External formats.
geo::Ring read_geojson_polygon(const std::filesystem::path& path);
RoadGraph read_road_graph_csv(const std::filesystem::path& path, const HexGrid& grid);
void write_grid_csv(const std::filesystem::path& path, const HexGrid& grid);
HexGrid read_grid_csv(const std::filesystem::path& path, double side);

}  // namespace relo::hex
