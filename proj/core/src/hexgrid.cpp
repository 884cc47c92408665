#include "relo/hexgrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "json.hpp"
#include "relo/csv.hpp"

namespace relo::hex {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// pointy-top, odd-r offset layout
// horizontal pitch sqrt(3)*side, vertical pitch 1.5*side, odd rows shifted
// right by half a pitch
geo::Point lattice_center(double minx, double miny, double side, int col, int row) {
    const double dx = kSqrt3 * side;
    return {minx + dx * (col + 0.5 * (row & 1)), miny + 1.5 * side * row};
}

const int kEvenRowNb[6][2] = {{-1, 0}, {1, 0}, {-1, -1}, {0, -1}, {-1, 1}, {0, 1}};
const int kOddRowNb[6][2] = {{-1, 0}, {1, 0}, {0, -1}, {1, -1}, {0, 1}, {1, 1}};

}  // namespace

HexGrid tessellate(const geo::Ring& polygon, double side) {
    if (side <= 0.0) throw std::invalid_argument("tessellate: side must be positive");
    if (polygon.size() < 3 || std::abs(geo::signed_area(polygon)) <= 0.0)
        throw std::invalid_argument("empty service area");

    double minx = polygon[0].x, maxx = polygon[0].x;
    double miny = polygon[0].y, maxy = polygon[0].y;
    for (const auto& p : polygon) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }

    const double dx = kSqrt3 * side;
    const int cols = static_cast<int>(std::floor((maxx - minx) / dx)) + 2;
    const int rows = static_cast<int>(std::floor((maxy - miny) / (1.5 * side))) + 2;

    HexGrid grid;
    grid.service_polygon = polygon;
    std::map<std::pair<int, int>, int> index;  // (col,row) -> cell id
    for (int r = 0; r <= rows; ++r) {
        for (int c = 0; c <= cols; ++c) {
            const geo::Point ctr = lattice_center(minx, miny, side, c, r);
            if (!geo::point_in_ring(ctr, polygon)) continue;
            HexCell cell;
            cell.id = static_cast<int>(grid.cells.size());
            cell.center = ctr;
            cell.side = side;
            index[{c, r}] = cell.id;
            grid.cells.push_back(cell);
        }
    }

    for (auto& [key, id] : index) {
        const auto [c, r] = key;
        const auto& nb = (r & 1) ? kOddRowNb : kEvenRowNb;
        for (int k = 0; k < 6; ++k) {
            auto it = index.find({c + nb[k][0], r + nb[k][1]});
            if (it != index.end()) grid.cells[id].neighbor_ids.push_back(it->second);
        }
        std::sort(grid.cells[id].neighbor_ids.begin(), grid.cells[id].neighbor_ids.end());
    }
    return grid;
}

DbscanResult dbscan_filter(const std::vector<geo::Point>& points, double eps, int min_pts) {
    if (points.empty()) throw std::invalid_argument("dbscan: empty input");
    if (eps <= 0.0 || min_pts < 1) throw std::invalid_argument("dbscan: bad parameters");

    const int n = static_cast<int>(points.size());
    const double eps2 = eps * eps;
    auto neighbors = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (geo::dist2(points[i], points[j]) <= eps2) out.push_back(j);
        return out;
    };

    DbscanResult res;
    res.labels.assign(n, -2);  // -2 = unvisited
    int next_label = 0;
    for (int i = 0; i < n; ++i) {
        if (res.labels[i] != -2) continue;
        auto nb = neighbors(i);
        if (static_cast<int>(nb.size()) < min_pts) {
            res.labels[i] = -1;
            continue;
        }
        const int label = next_label++;
        res.labels[i] = label;
        std::queue<int> frontier;
        for (int j : nb)
            if (j != i) frontier.push(j);
        while (!frontier.empty()) {
            const int q = frontier.front();
            frontier.pop();
            if (res.labels[q] == -1) res.labels[q] = label;  // border point
            if (res.labels[q] != -2) continue;
            res.labels[q] = label;
            auto qn = neighbors(q);
            if (static_cast<int>(qn.size()) >= min_pts)
                for (int j : qn) frontier.push(j);
        }
    }

    std::vector<int> sizes(next_label, 0);
    for (int l : res.labels)
        if (l >= 0) sizes[l]++;
    res.core_label = -1;
    int best = 0;
    for (int l = 0; l < next_label; ++l)
        if (sizes[l] > best) {
            best = sizes[l];
            res.core_label = l;
        }
    return res;
}

HexGrid filter_to_core(const HexGrid& grid, double eps, int min_pts) {
    std::vector<geo::Point> centers;
    centers.reserve(grid.cells.size());
    for (const auto& c : grid.cells) centers.push_back(c.center);
    const DbscanResult db = dbscan_filter(centers, eps, min_pts);

    std::vector<int> remap(grid.cells.size(), -1);
    HexGrid out;
    out.service_polygon = grid.service_polygon;
    for (const auto& c : grid.cells) {
        if (db.labels[c.id] != db.core_label) continue;
        HexCell cell = c;
        cell.id = static_cast<int>(out.cells.size());
        cell.neighbor_ids.clear();
        remap[c.id] = cell.id;
        out.cells.push_back(cell);
    }
    for (const auto& c : grid.cells) {
        if (remap[c.id] < 0) continue;
        for (int nb : c.neighbor_ids)
            if (remap[nb] >= 0) out.cells[remap[c.id]].neighbor_ids.push_back(remap[nb]);
    }
    return out;
}

void RoadGraph::add_edge(int a, int b, double length) {
    if (length <= 0.0) throw std::invalid_argument("road graph: edge length must be positive");
    const int need = std::max(a, b) + 1;
    if (static_cast<int>(adj.size()) < need) adj.resize(need);
    adj[a].emplace_back(b, length);
    adj[b].emplace_back(a, length);
}

void RoadGraph::anchor_cells(const HexGrid& grid) {
    cell_anchor.clear();
    for (const auto& c : grid.cells) {
        int best = -1;
        double bd = kInf;
        for (size_t i = 0; i < nodes.size(); ++i) {
            const double d = geo::dist2(c.center, nodes[i]);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) throw std::runtime_error("road graph has no nodes to anchor cells");
        cell_anchor[c.id] = best;
    }
}

double road_distance(const HexCell& a, const HexCell& b, const RoadGraph& g, bool adjacency_only) {
    if (a.id == b.id) return 0.0;
    if (adjacency_only &&
        !std::binary_search(a.neighbor_ids.begin(), a.neighbor_ids.end(), b.id))
        return kInf;

    const auto sa = g.cell_anchor.find(a.id);
    const auto sb = g.cell_anchor.find(b.id);
    if (sa == g.cell_anchor.end() || sb == g.cell_anchor.end())
        throw std::invalid_argument("road_distance: cell has no anchor");
    const int src = sa->second, dst = sb->second;
    if (src == dst) return 0.0;

    // Dijkstra
    std::vector<double> dist(g.adj.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == dst) return d;
        for (auto [v, w] : g.adj[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return kInf;
}

RoadGraph lattice_road_graph(const HexGrid& grid) {
    RoadGraph g;
    g.nodes.reserve(grid.cells.size());
    for (const auto& c : grid.cells) g.nodes.push_back(c.center);
    g.adj.resize(grid.cells.size());
    for (const auto& c : grid.cells)
        for (int nb : c.neighbor_ids)
            if (nb > c.id) g.add_edge(c.id, nb, geo::dist(c.center, grid.cells[nb].center));
    for (const auto& c : grid.cells) g.cell_anchor[c.id] = c.id;
    return g;
}

geo::Ring read_geojson_polygon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    if (j.contains("type") && j["type"] == "Feature") j = j["geometry"];
    if (!j.contains("type") || j["type"] != "Polygon")
        throw std::runtime_error("expected a GeoJSON Polygon in " + path.string());
    const auto& ring = j["coordinates"][0];
    geo::Ring out;
    for (const auto& pt : ring) out.push_back({pt[0].get<double>(), pt[1].get<double>()});
    // drop a duplicated closing vertex
    if (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y)
        out.pop_back();
    return out;
}

RoadGraph read_road_graph_csv(const std::filesystem::path& path, const HexGrid& grid) {
    RoadGraph g;
    std::map<std::pair<double, double>, int> node_ids;
    auto node_of = [&](double x, double y) {
        auto it = node_ids.find({x, y});
        if (it != node_ids.end()) return it->second;
        const int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back({x, y});
        node_ids[{x, y}] = id;
        return id;
    };
    for (const auto& r : csv::read_rows(path)) {
        if (r.size() != 5)
            throw std::runtime_error("road graph csv: expected 5 fields in " + path.string());
        const int a = node_of(std::stod(r[0]), std::stod(r[1]));
        const int b = node_of(std::stod(r[2]), std::stod(r[3]));
        g.add_edge(a, b, std::stod(r[4]));
    }
    g.adj.resize(g.nodes.size());
    g.anchor_cells(grid);
    return g;
}

void write_grid_csv(const std::filesystem::path& path, const HexGrid& grid) {
    csv::Writer w(path);
    w.raw_line("cell_id,center_x,center_y,neighbor_ids");
    for (const auto& c : grid.cells) {
        std::string nbs;
        for (size_t i = 0; i < c.neighbor_ids.size(); ++i) {
            if (i) nbs += ';';
            nbs += std::to_string(c.neighbor_ids[i]);
        }
        w.row({std::to_string(c.id), csv::fmt(c.center.x), csv::fmt(c.center.y), nbs});
    }
}

HexGrid read_grid_csv(const std::filesystem::path& path, double side) {
    HexGrid grid;
    for (const auto& r : csv::read_rows(path)) {
        if (r.size() != 4) throw std::runtime_error("grid csv: expected 4 fields in " + path.string());
        HexCell c;
        c.id = std::stoi(r[0]);
        c.center = {std::stod(r[1]), std::stod(r[2])};
        c.side = side;
        if (!r[3].empty())
            for (const auto& f : csv::split_line(r[3], ';')) c.neighbor_ids.push_back(std::stoi(f));
        std::sort(c.neighbor_ids.begin(), c.neighbor_ids.end());
        if (c.id != static_cast<int>(grid.cells.size()))
            throw std::runtime_error("grid csv: cell ids must be dense and ordered");
        grid.cells.push_back(std::move(c));
    }
    return grid;
}

}  // namespace relo::hex
