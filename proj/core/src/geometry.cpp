#include "relo/geometry.hpp"

#include <algorithm>
#include <limits>

namespace relo::geo {

double signed_area(const Ring& ring) {
    double a = 0.0;
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const Point& p = ring[i];
        const Point& q = ring[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

bool point_in_ring(const Point& p, const Ring& ring) {
    bool inside = false;
    const size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double distance_to_ring(const Point& p, const Ring& ring) {
    double best = std::numeric_limits<double>::infinity();
    const size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        const double vx = b.x - a.x, vy = b.y - a.y;
        const double len2 = vx * vx + vy * vy;
        double t = 0.0;
        if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
        const Point proj{a.x + t * vx, a.y + t * vy};
        best = std::min(best, dist(p, proj));
    }
    return best;
}

}  // namespace relo::geo
