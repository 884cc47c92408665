#pragma once

#include <cmath>
#include <vector>

namespace relo::geo {

// Planar projected coordinates in meters. Geographic conversion happens
// upstream, at data ingestion.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

using Ring = std::vector<Point>;

// Signed shoelace area; positive for counter-clockwise rings.
double signed_area(const Ring& ring);

// Strict-interior test (crossing number); points on the boundary are
// treated as outside.
bool point_in_ring(const Point& p, const Ring& ring);

// Distance from p to the closest ring edge.
double distance_to_ring(const Point& p, const Ring& ring);

}  // namespace relo::geo
