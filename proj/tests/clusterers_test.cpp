#include <set>

#include "doctest.h"
#include "relo/clusterers.hpp"
#include "relo/rng.hpp"

using namespace relo;

namespace {

std::vector<geo::Point> three_blobs(int per_blob, uint64_t seed) {
    Rng rng(seed);
    std::vector<geo::Point> pts;
    const geo::Point centers[3] = {{0, 0}, {5000, 0}, {0, 5000}};
    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < per_blob; ++k)
            pts.push_back({centers[b].x + rng.next_gaussian() * 150,
                           centers[b].y + rng.next_gaussian() * 150});
    return pts;
}

bool blobs_separated(const std::vector<int>& assign, int per_blob) {
    std::set<int> labels;
    for (int b = 0; b < 3; ++b) {
        const int l = assign[b * per_blob];
        labels.insert(l);
        for (int k = 1; k < per_blob; ++k)
            if (assign[b * per_blob + k] != l) return false;
    }
    return labels.size() == 3;
}

}  // namespace

TEST_SUITE("clusterers") {

TEST_CASE("kmeans separates well-spaced blobs and is seed-stable") {
    const auto pts = three_blobs(12, 1);
    const auto a1 = cluster::kmeans(pts, 3, 42);
    const auto a2 = cluster::kmeans(pts, 3, 42);
    CHECK(a1 == a2);
    CHECK(blobs_separated(a1, 12));
}

TEST_CASE("bisecting kmeans separates blobs") {
    const auto pts = three_blobs(10, 2);
    CHECK(blobs_separated(cluster::bisecting_kmeans(pts, 3, 9), 10));
}

TEST_CASE("agglomerative linkages separate blobs and form k groups") {
    const auto pts = three_blobs(8, 3);
    for (const auto linkage :
         {cluster::Linkage::average, cluster::Linkage::complete, cluster::Linkage::ward}) {
        const auto a = cluster::agglomerative_euclidean(pts, 3, linkage);
        CHECK(blobs_separated(a, 8));
    }
    const auto five = cluster::agglomerative_euclidean(pts, 5, cluster::Linkage::average);
    CHECK(std::set<int>(five.begin(), five.end()).size() == 5);
}

TEST_CASE("every point gets a label in range") {
    const auto pts = three_blobs(7, 4);
    for (const auto& assign : {cluster::kmeans(pts, 4, 5), cluster::bisecting_kmeans(pts, 4, 5),
                               cluster::agglomerative_euclidean(pts, 4, cluster::Linkage::ward)}) {
        REQUIRE(assign.size() == pts.size());
        for (int a : assign) {
            CHECK(a >= 0);
            CHECK(a < 4);
        }
    }
}

}  // TEST_SUITE
