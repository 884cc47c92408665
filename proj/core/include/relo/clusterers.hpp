#pragma once

#include <cstdint>
#include <vector>

#include "relo/geometry.hpp"

namespace relo::cluster {

enum class Linkage { average, complete, ward };

// Comparison clusterers over Euclidean coordinates only, used to contrast
// the temporal-pattern-aware zoning against plain geometric grouping.

// Lloyd iterations with seed-controlled restarts; returns assignment.
std::vector<int> kmeans(const std::vector<geo::Point>& pts, int k, uint64_t seed,
                        int restarts = 20, int max_iter = 100);

// Repeatedly splits the largest cluster with 2-means.
std::vector<int> bisecting_kmeans(const std::vector<geo::Point>& pts, int k, uint64_t seed);

// Classic agglomerative clustering cut at k clusters.
std::vector<int> agglomerative_euclidean(const std::vector<geo::Point>& pts, int k,
                                         Linkage linkage);

}  // namespace relo::cluster
