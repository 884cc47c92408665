#include "relo/clusterers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "relo/rng.hpp"

namespace relo::cluster {

namespace {

double sq_cost(const std::vector<geo::Point>& pts, const std::vector<int>& assign,
               const std::vector<geo::Point>& centers) {
    double c = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) c += geo::dist2(pts[i], centers[assign[i]]);
    return c;
}

// one Lloyd run from k-means++ style seeding
std::pair<std::vector<int>, double> lloyd_once(const std::vector<geo::Point>& pts, int k,
                                               Rng& rng, int max_iter) {
    const int n = static_cast<int>(pts.size());
    std::vector<geo::Point> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.next_below(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, geo::dist2(pts[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(pts[rng.next_below(n)]);
            continue;
        }
        const double r = rng.next_double() * total;
        double cum = 0.0;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            cum += d2[i];
            if (r < cum) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }

    std::vector<int> assign(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = geo::dist2(pts[i], centers[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (best != assign[i]) {
                assign[i] = best;
                moved = true;
            }
        }
        std::vector<geo::Point> sums(k, {0, 0});
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums[assign[i]].x += pts[i].x;
            sums[assign[i]].y += pts[i].y;
            counts[assign[i]]++;
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers[c] = {sums[c].x / counts[c], sums[c].y / counts[c]};
        if (!moved) break;
    }
    return {assign, sq_cost(pts, assign, centers)};
}

}  // namespace

std::vector<int> kmeans(const std::vector<geo::Point>& pts, int k, uint64_t seed, int restarts,
                        int max_iter) {
    if (k < 1 || pts.empty()) throw std::invalid_argument("kmeans: bad input");
    k = std::min<int>(k, static_cast<int>(pts.size()));
    std::vector<int> best_assign;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive(seed, 0x4d3a2ull, r));
        auto [assign, cost] = lloyd_once(pts, k, rng, max_iter);
        if (cost < best_cost) {
            best_cost = cost;
            best_assign = std::move(assign);
        }
    }
    return best_assign;
}

std::vector<int> bisecting_kmeans(const std::vector<geo::Point>& pts, int k, uint64_t seed) {
    const int n = static_cast<int>(pts.size());
    if (k < 1 || n == 0) throw std::invalid_argument("bisecting_kmeans: bad input");
    std::vector<int> assign(n, 0);
    int clusters = 1;
    int step = 0;
    while (clusters < std::min(k, n)) {
        // split the most populous cluster
        std::vector<int> counts(clusters, 0);
        for (int a : assign) counts[a]++;
        const int target =
            static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        std::vector<int> ids;
        std::vector<geo::Point> sub;
        for (int i = 0; i < n; ++i)
            if (assign[i] == target) {
                ids.push_back(i);
                sub.push_back(pts[i]);
            }
        if (sub.size() < 2) break;
        const auto split = kmeans(sub, 2, derive(seed, 0xb15ull, step), 8);
        for (size_t s = 0; s < ids.size(); ++s)
            if (split[s] == 1) assign[ids[s]] = clusters;
        ++clusters;
        ++step;
    }
    return assign;
}

std::vector<int> agglomerative_euclidean(const std::vector<geo::Point>& pts, int k,
                                         Linkage linkage) {
    const int n = static_cast<int>(pts.size());
    if (k < 1 || n == 0) throw std::invalid_argument("agglomerative: bad input");

    std::vector<std::vector<int>> members(n);
    std::vector<geo::Point> centroid(pts);
    std::vector<bool> alive(n, true);
    for (int i = 0; i < n; ++i) members[i] = {i};

    // pairwise distances maintained under the chosen linkage
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v;
            switch (linkage) {
                case Linkage::ward:
                    v = 0.5 * geo::dist2(pts[i], pts[j]);
                    break;
                default:
                    v = geo::dist(pts[i], pts[j]);
            }
            d[i][j] = d[j][i] = v;
        }

    int clusters = n;
    while (clusters > k) {
        int bi = -1, bj = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!alive[j]) continue;
                if (d[i][j] < bd) {
                    bd = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = members[bi].size(), nj = members[bj].size();
        for (int x = 0; x < n; ++x) {
            if (!alive[x] || x == bi || x == bj) continue;
            const double nx = members[x].size();
            switch (linkage) {
                case Linkage::average:
                    d[bi][x] = d[x][bi] = (ni * d[bi][x] + nj * d[bj][x]) / (ni + nj);
                    break;
                case Linkage::complete:
                    d[bi][x] = d[x][bi] = std::max(d[bi][x], d[bj][x]);
                    break;
                case Linkage::ward:
                    // Lance-Williams update for Ward linkage
                    d[bi][x] = d[x][bi] = ((ni + nx) * d[bi][x] + (nj + nx) * d[bj][x] -
                                           nx * bd) /
                                          (ni + nj + nx);
                    break;
            }
        }
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        centroid[bi] = {(centroid[bi].x * ni + centroid[bj].x * nj) / (ni + nj),
                        (centroid[bi].y * ni + centroid[bj].y * nj) / (ni + nj)};
        alive[bj] = false;
        --clusters;
    }

    std::vector<int> assign(n, -1);
    int label = 0;
    for (int i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        for (int m : members[i]) assign[m] = label;
        ++label;
    }
    return assign;
}

}  // namespace relo::cluster
