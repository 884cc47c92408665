#include "relo/zoning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "relo/csv.hpp"
#include "relo/dtw.hpp"
#include "relo/predictors.hpp"

namespace relo::zoning {

namespace {

uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

double ward(const Cluster& a, const Cluster& b) {
    const double na = a.size(), nb = b.size();
    return na * nb / (na + nb) * geo::dist2(a.centroid, b.centroid);
}

Cluster merge_clusters(const Cluster& a, const Cluster& b) {
    Cluster c;
    c.members.resize(a.members.size() + b.members.size());
    std::merge(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
               c.members.begin());
    const double na = a.size(), nb = b.size();
    c.centroid = {(a.centroid.x * na + b.centroid.x * nb) / (na + nb),
                  (a.centroid.y * na + b.centroid.y * nb) / (na + nb)};
    c.road_length = a.road_length + b.road_length;
    c.car_series.resize(a.car_series.size());
    c.act_series.resize(a.act_series.size());
    for (size_t i = 0; i < c.car_series.size(); ++i)
        c.car_series[i] = a.car_series[i] + b.car_series[i];
    for (size_t i = 0; i < c.act_series.size(); ++i)
        c.act_series[i] = a.act_series[i] + b.act_series[i];
    return c;
}

}  // namespace

Components component_distances(const Cluster& a, const Cluster& b, const hex::HexGrid& grid,
                               const hex::RoadGraph& roads) {
    Components out;
    double rd = hex::kInf;
    for (int ca : a.members)
        for (int cb : b.members) {
            const double d = hex::road_distance(grid.cell(ca), grid.cell(cb), roads, true);
            rd = std::min(rd, d);
        }
    out[0] = rd;
    out[1] = std::abs(a.road_density() - b.road_density());
    out[2] = ward(a, b);
    out[3] = dtw(a.car_series, b.car_series);
    out[4] = dtw(a.act_series, b.act_series);
    return out;
}

void normalize_component(std::vector<double>& entries) {
    double mx = 0.0;
    bool any = false;
    for (double e : entries)
        if (std::isfinite(e)) {
            mx = std::max(mx, e);
            any = true;
        }
    if (!any) throw std::runtime_error("normalize: all entries infinite");
    if (mx == 0.0) return;  // all-zero component carries no signal
    for (double& e : entries)
        if (std::isfinite(e)) e /= mx;
}

bool contains(const Cluster& a, const Cluster& b, const hex::HexGrid& grid) {
    for (int cb : b.members) {
        const hex::HexCell& cell = grid.cell(cb);
        if (!cell.interior()) return false;  // touches the lattice exterior
        for (int nb : cell.neighbor_ids) {
            const bool in_b = std::binary_search(b.members.begin(), b.members.end(), nb);
            const bool in_a = std::binary_search(a.members.begin(), a.members.end(), nb);
            if (!in_a && !in_b) return false;
        }
    }
    return true;
}

namespace {

// State for the merge loop: live clusters in stable slots, single-linkage
// road distances per adjacent pair, and a cache of combined distances.
struct MergeState {
    const hex::HexGrid& grid;
    const ClusterOptions& opt;
    std::vector<Cluster> clusters;
    std::vector<bool> alive;
    std::unordered_map<uint64_t, double> rd;           // adjacent-pair road distance
    std::vector<std::vector<int>> rd_nb;               // adjacency lists over rd
    std::unordered_map<uint64_t, double> combined;     // cached pair distance
    std::unordered_map<uint64_t, double> sl_combined;  // single_linkage_all mode
    Components maxima{1, 1, 1, 1, 1};                  // initial normalization divisors

    bool adjacent(int a, int b) const { return rd.count(pair_key(a, b)) > 0; }

    double raw_combined(int a, int b) const {
        const auto& w = opt.weights;
        const Cluster& A = clusters[a];
        const Cluster& B = clusters[b];
        double total = 0.0;
        if (w.w_rd > 0.0) {
            const auto it = rd.find(pair_key(a, b));
            if (it == rd.end()) return hex::kInf;
            total += w.w_rd * it->second / maxima[0];
        }
        if (w.w_dns > 0.0)
            total += w.w_dns * std::abs(A.road_density() - B.road_density()) / maxima[1];
        if (w.w_sh > 0.0) total += w.w_sh * ward(A, B) / maxima[2];
        if (w.w_cars > 0.0) total += w.w_cars * dtw(A.car_series, B.car_series) / maxima[3];
        if (w.w_act > 0.0) total += w.w_act * dtw(A.act_series, B.act_series) / maxima[4];
        return total;
    }

    double pair_distance(int a, int b) {
        const uint64_t key = pair_key(a, b);
        if (opt.single_linkage_all) {
            const auto it = sl_combined.find(key);
            return it == sl_combined.end() ? hex::kInf : it->second;
        }
        auto it = combined.find(key);
        if (it != combined.end()) return it->second;
        const double d = raw_combined(a, b);
        combined.emplace(key, d);
        return d;
    }

    // candidate partners of cluster `a` for distance computation
    std::vector<int> partners(int a) const {
        std::vector<int> out;
        if (opt.weights.w_rd > 0.0) {
            out = rd_nb[a];
        } else {
            for (int x = 0; x < static_cast<int>(clusters.size()); ++x)
                if (alive[x] && x != a) out.push_back(x);
        }
        return out;
    }

    // merges b into a (a < b kept by caller); returns surviving slot
    int merge_into(int a, int b) {
        clusters[a] = merge_clusters(clusters[a], clusters[b]);
        alive[b] = false;

        // single-linkage union of rd entries and of the test-mode matrix
        auto fold = [&](std::unordered_map<uint64_t, double>& store,
                        std::vector<std::vector<int>>* nb_lists) {
            std::vector<int> b_partners = nb_lists ? (*nb_lists)[b] : std::vector<int>{};
            if (!nb_lists) {
                for (int x = 0; x < static_cast<int>(clusters.size()); ++x)
                    if (x != a && x != b && store.count(pair_key(b, x))) b_partners.push_back(x);
            }
            for (int x : b_partners) {
                if (x == a || !alive[x]) {
                    store.erase(pair_key(b, x));
                    continue;
                }
                const auto itbx = store.find(pair_key(b, x));
                if (itbx == store.end()) continue;
                const double dbx = itbx->second;
                store.erase(itbx);
                auto [itax, inserted] = store.try_emplace(pair_key(a, x), dbx);
                if (!inserted) itax->second = std::min(itax->second, dbx);
                if (inserted && nb_lists) {
                    (*nb_lists)[a].push_back(x);
                    (*nb_lists)[x].push_back(a);
                }
            }
            store.erase(pair_key(a, b));
        };
        fold(rd, &rd_nb);
        if (opt.single_linkage_all) fold(sl_combined, nullptr);

        // drop b from adjacency lists, drop stale cached distances
        for (auto& lst : rd_nb)
            lst.erase(std::remove(lst.begin(), lst.end(), b), lst.end());
        rd_nb[b].clear();
        for (int x = 0; x < static_cast<int>(clusters.size()); ++x) {
            combined.erase(pair_key(a, x));
            combined.erase(pair_key(b, x));
        }
        return a;
    }

    // absorbs any cluster sealed inside another, starting from `seed`
    void absorb_contained(int seed) {
        int focus = seed;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int x = 0; x < static_cast<int>(clusters.size()) && !changed; ++x) {
                if (!alive[x] || x == focus || !alive[focus]) continue;
                if (contains(clusters[focus], clusters[x], grid) ||
                    contains(clusters[x], clusters[focus], grid)) {
                    const int lo = std::min(focus, x), hi = std::max(focus, x);
                    merge_into(lo, hi);
                    focus = lo;
                    changed = true;
                }
            }
        }
    }
};

}  // namespace

ZoningResult agglomerative_cluster(const hex::HexGrid& grid, const CellAttributes& attrs,
                                   const hex::RoadGraph& roads, const ClusterOptions& opt) {
    const int n = grid.size();
    if (n == 0) throw std::invalid_argument("agglomerative_cluster: empty grid");
    if (opt.max_size < 1) throw std::invalid_argument("agglomerative_cluster: max_size must be >= 1");
    const int P = attrs.car_series.cols;

    MergeState st{grid, opt, {}, {}, {}, {}, {}, {}, {1, 1, 1, 1, 1}};
    st.clusters.reserve(n);
    st.alive.assign(n, true);
    st.rd_nb.assign(n, {});
    for (int i = 0; i < n; ++i) {
        Cluster c;
        c.members = {i};
        c.centroid = grid.cell(i).center;
        c.road_length = attrs.road_length.empty() ? 0.0 : attrs.road_length[i];
        c.car_series.assign(&attrs.car_series.v[static_cast<size_t>(i) * P],
                            &attrs.car_series.v[static_cast<size_t>(i) * P] + P);
        c.act_series.assign(&attrs.act_series.v[static_cast<size_t>(i) * P],
                            &attrs.act_series.v[static_cast<size_t>(i) * P] + P);
        st.clusters.push_back(std::move(c));
    }

    // adjacent-pair road distances (the only finite d_rd entries)
    for (int i = 0; i < n; ++i)
        for (int j : grid.cell(i).neighbor_ids)
            if (j > i) {
                const double d = hex::road_distance(grid.cell(i), grid.cell(j), roads, true);
                if (std::isfinite(d)) {
                    st.rd.emplace(pair_key(i, j), d);
                    st.rd_nb[i].push_back(j);
                    st.rd_nb[j].push_back(i);
                }
            }

    // Normalization divisors fixed once from the initial candidate pairs;
    // merged clusters are renormalized by the same maxima.
    const bool adjacent_only = opt.weights.w_rd > 0.0;
    Components mx{0, 0, 0, 0, 0};
    auto fold_maxima = [&](int i, int j) {
        const Cluster& A = st.clusters[i];
        const Cluster& B = st.clusters[j];
        const auto it = st.rd.find(pair_key(i, j));
        if (it != st.rd.end()) mx[0] = std::max(mx[0], it->second);
        mx[1] = std::max(mx[1], std::abs(A.road_density() - B.road_density()));
        mx[2] = std::max(mx[2], ward(A, B));
        if (opt.weights.w_cars > 0.0) mx[3] = std::max(mx[3], dtw(A.car_series, B.car_series));
        if (opt.weights.w_act > 0.0) mx[4] = std::max(mx[4], dtw(A.act_series, B.act_series));
    };
    if (adjacent_only) {
        for (int i = 0; i < n; ++i)
            for (int j : st.rd_nb[i])
                if (j > i) fold_maxima(i, j);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) fold_maxima(i, j);
    }
    for (int k = 0; k < 5; ++k) st.maxima[k] = mx[k] > 0.0 ? mx[k] : 1.0;

    if (opt.single_linkage_all) {
        // freeze the combined matrix at singleton granularity
        auto seed_pair = [&](int i, int j) {
            const double d = st.raw_combined(i, j);
            if (std::isfinite(d)) st.sl_combined.emplace(pair_key(i, j), d);
        };
        if (adjacent_only) {
            for (int i = 0; i < n; ++i)
                for (int j : st.rd_nb[i])
                    if (j > i) seed_pair(i, j);
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) seed_pair(i, j);
        }
    }

    ZoningResult result;
    result.max_size = opt.max_size;

    for (;;) {
        double best = hex::kInf;
        int ba = -1, bb = -1;
        for (int a = 0; a < n; ++a) {
            if (!st.alive[a]) continue;
            for (int b : st.partners(a)) {
                if (b <= a || !st.alive[b]) continue;
                if (st.clusters[a].size() + st.clusters[b].size() > opt.max_size) continue;
                const double d = st.pair_distance(a, b);
                if (d < best) {
                    best = d;
                    ba = a;
                    bb = b;
                }
            }
        }
        if (ba < 0 || !std::isfinite(best)) break;  // no mergeable pair left
        result.merge_trace.push_back(best);
        const int survivor = st.merge_into(ba, bb);
        st.absorb_contained(survivor);
    }

    result.zone_of.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (!st.alive[s]) continue;
        const int z = static_cast<int>(result.zones.size());
        for (int cell : st.clusters[s].members) result.zone_of[cell] = z;
        result.zones.push_back(std::move(st.clusters[s]));
    }
    return result;
}

ValidationSummary validate_zoning(const Matrix& zone_series, const std::vector<int>& horizons,
                                  int window, double l1_strength) {
    const int zones = zone_series.rows;
    const int L = zone_series.cols;
    ValidationSummary vs;

    for (int h : horizons) {
        const int train_len = static_cast<int>(std::floor(0.7 * L));
        if (train_len < window + h + 1 || train_len >= L)
            throw std::invalid_argument("validate_zoning: series shorter than window + horizon");

        ValidationSummary::Aggregate agg;
        agg.horizon = h;
        std::vector<double> r2s;
        double sum_mse = 0, sum_rmse = 0, sum_maxe = 0, sum_med = 0, sum_mae = 0;

        for (int z = 0; z < zones; ++z) {
            std::span<const double> full(&zone_series.v[static_cast<size_t>(z) * L], L);
            ZoneScore sc;
            sc.zone = z;
            sc.horizon = h;

            double tmin = full[train_len], tmax = full[train_len];
            for (int q = train_len; q < L; ++q) {
                tmin = std::min(tmin, full[q]);
                tmax = std::max(tmax, full[q]);
            }
            if (tmax == tmin) {
                sc.skipped = true;  // constant target, r2 undefined
                vs.per_zone.push_back(sc);
                agg.zones_skipped++;
                continue;
            }

            const auto coef = pred::fit_linear(full.subspan(0, train_len), window, h,
                                               pred::Penalty::l1, l1_strength);
            std::vector<double> errs;
            double ss_res = 0, ss_tot = 0, y_mean = 0;
            int cnt = 0;
            for (int q = train_len; q < L; ++q) y_mean += full[q], ++cnt;
            y_mean /= cnt;
            for (int q = train_len; q < L; ++q) {
                std::span<const double> recent(&full[q - h - window + 1], window);
                const double yhat = pred::predict_linear(recent, coef);
                const double err = full[q] - yhat;
                errs.push_back(std::abs(err));
                ss_res += err * err;
                ss_tot += (full[q] - y_mean) * (full[q] - y_mean);
            }
            sc.r2 = 1.0 - ss_res / ss_tot;
            sc.mse = ss_res / cnt;
            sc.rmse = std::sqrt(sc.mse);
            sc.maxe = *std::max_element(errs.begin(), errs.end());
            std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
            sc.med = errs[errs.size() / 2];
            double mae = 0;
            for (double e : errs) mae += e;
            sc.mae = mae / errs.size();

            vs.per_zone.push_back(sc);
            r2s.push_back(sc.r2);
            sum_mse += sc.mse;
            sum_rmse += sc.rmse;
            sum_maxe += sc.maxe;
            sum_med += sc.med;
            sum_mae += sc.mae;
            agg.zones_scored++;
        }

        if (agg.zones_scored > 0) {
            double m = 0;
            for (double r : r2s) m += r;
            m /= r2s.size();
            double var = 0;
            for (double r : r2s) var += (r - m) * (r - m);
            agg.mean_r2 = m;
            agg.std_r2 = r2s.size() > 1 ? std::sqrt(var / (r2s.size() - 1)) : 0.0;
            std::vector<double> sorted = r2s;
            std::sort(sorted.begin(), sorted.end());
            agg.median_r2 = sorted[sorted.size() / 2];
            agg.mean_mse = sum_mse / agg.zones_scored;
            agg.mean_rmse = sum_rmse / agg.zones_scored;
            agg.mean_maxe = sum_maxe / agg.zones_scored;
            agg.mean_med = sum_med / agg.zones_scored;
            agg.mean_mae = sum_mae / agg.zones_scored;
        }
        vs.aggregates.push_back(agg);
    }
    return vs;
}

void write_zones_csv(const std::filesystem::path& path, const ZoningResult& zr) {
    csv::Writer w(path);
    w.raw_line("cell_id,zone_id");
    for (size_t c = 0; c < zr.zone_of.size(); ++c)
        w.row({std::to_string(c), std::to_string(zr.zone_of[c])});
}

void write_zone_summary_json(const std::filesystem::path& path, const ZoningResult& zr) {
    nlohmann::json j = nlohmann::json::array();
    for (size_t z = 0; z < zr.zones.size(); ++z) {
        const Cluster& c = zr.zones[z];
        j.push_back({{"zone", z},
                     {"size", c.size()},
                     {"centroid", {c.centroid.x, c.centroid.y}},
                     {"road_density", c.road_density()}});
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void write_validation_csv(const std::filesystem::path& path, const ValidationSummary& vs) {
    csv::Writer w(path);
    w.raw_line("zone,horizon,skipped,r2,mse,rmse,maxe,med,mae");
    for (const auto& s : vs.per_zone)
        w.row({std::to_string(s.zone), std::to_string(s.horizon), s.skipped ? "1" : "0",
               csv::fmt(s.r2), csv::fmt(s.mse), csv::fmt(s.rmse), csv::fmt(s.maxe),
               csv::fmt(s.med), csv::fmt(s.mae)});
}

}  // namespace relo::zoning
