#include "relo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "relo/rng.hpp"

namespace relo::synth {

namespace {

double gauss_bump(double t_hours, double center, double width) {
    const double z = (t_hours - center) / width;
    return std::exp(-0.5 * z * z);
}

// bimodal daily activity: morning and evening rush over a low base
double daily_profile(double t_hours) {
    return 0.18 + gauss_bump(t_hours, 8.5, 1.4) + 0.95 * gauss_bump(t_hours, 17.0, 1.8) +
           0.25 * gauss_bump(t_hours, 12.5, 2.5);
}

double morning_share(double t_hours) {
    const double m = gauss_bump(t_hours, 8.5, 1.6);
    const double e = gauss_bump(t_hours, 17.0, 2.0);
    return (m + 1e-6) / (m + e + 2e-6);
}

double rush_multiplier(double t_hours) {
    return 1.0 + 0.5 * (gauss_bump(t_hours, 8.5, 1.2) + gauss_bump(t_hours, 17.0, 1.5));
}

}  // namespace

double distance_decay(double meters, double exponent) {
    return std::pow(1000.0 / std::max(500.0, meters), exponent);
}

ZoneDataset generate_zone_dataset(const SyntheticSpec& spec) {
    const int N = spec.zones;
    const int P = spec.slots;
    if (N < 2 || P < 1) throw std::invalid_argument("synthetic: need at least 2 zones");
    Rng rng(derive(spec.seed, 0x5f17ull));

    ZoneDataset ds;
    ds.centroids.resize(N);
    // sunflower disc layout: evenly spread zone centroids
    const double golden_angle = 2.39996322972865332;
    for (int i = 0; i < N; ++i) {
        const double r = spec.city_radius_m * std::sqrt((i + 0.5) / N);
        const double a = i * golden_angle;
        ds.centroids[i] = {r * std::cos(a), r * std::sin(a)};
    }

    std::vector<double> centrality(N), suburb(N), origin_w(N), dest_w(N);
    for (int i = 0; i < N; ++i) {
        const double d = std::hypot(ds.centroids[i].x, ds.centroids[i].y);
        centrality[i] = std::exp(-d / (0.45 * spec.city_radius_m));
        suburb[i] = 1.0 - 0.8 * centrality[i];
    }
    // Persistent origin/destination asymmetry: a handful of attractor
    // zones (malls, transit hubs) soak up arrivals while generating far
    // fewer departures, so vehicles strand there without relocation.
    for (int i = 0; i < N; ++i) {
        const bool sink = (i % 9 == 4);
        const bool source = (i % 9 == 1);
        origin_w[i] = 0.35 + 0.8 * suburb[i] + (source ? 1.0 : 0.0);
        dest_w[i] = 0.35 + 0.8 * centrality[i] + (sink ? 1.4 : 0.0);
    }
    auto normalize = [](std::vector<double> v) {
        double s = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= s;
        return v;
    };
    const auto cen_n = normalize(centrality);
    const auto sub_n = normalize(suburb);
    const auto org_n = normalize(origin_w);
    const auto dst_n = normalize(dest_w);

    // distance decay with a floor for intra-zone trips
    const double self_dist = 900.0;
    Matrix decay(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            decay.at(i, j) = distance_decay(
                std::max(self_dist, geo::dist(ds.centroids[i], ds.centroids[j])),
                spec.decay_exponent);

    ds.trips = Tensor3(N, N, P);
    double total = 0.0;
    std::vector<double> prof(P);
    for (int t = 0; t < P; ++t) prof[t] = daily_profile((t + 0.5) * 24.0 / P);
    const double prof_sum = std::accumulate(prof.begin(), prof.end(), 0.0);

    for (int t = 0; t < P; ++t) {
        const double m = morning_share((t + 0.5) * 24.0 / P);
        const double bias = spec.attraction_bias;
        double slot_total = 0.0;
        for (int i = 0; i < N; ++i) {
            const double wo = (1.0 - bias) * org_n[i] + bias * (m * sub_n[i] + (1.0 - m) * cen_n[i]);
            for (int j = 0; j < N; ++j) {
                const double wd =
                    (1.0 - bias) * dst_n[j] + bias * (m * cen_n[j] + (1.0 - m) * sub_n[j]);
                const double f = wo * wd * decay.at(i, j);
                ds.trips.at(i, j, t) = f;
                slot_total += f;
            }
        }
        const double want = spec.daily_demand * prof[t] / prof_sum;
        const double scale = slot_total > 0 ? want / slot_total : 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) ds.trips.at(i, j, t) *= scale;
        total += want;
    }
    (void)total;

    ds.activity = Matrix(N, P);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < P; ++t) {
            double row = 0.0;
            for (int j = 0; j < N; ++j) row += ds.trips.at(i, j, t);
            const double noise = 1.0 + spec.activity_noise * (2.0 * rng.next_double() - 1.0);
            ds.activity.at(i, t) = spec.delta_target * row * noise;
        }

    const double speed_m_per_min = spec.mean_speed_kmh * 1000.0 / 60.0;
    ds.travel.values = Tensor3(N, N, P);
    ds.travel.horizon = P;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double d = std::max(self_dist, geo::dist(ds.centroids[i], ds.centroids[j]));
            for (int t = 0; t < P; ++t) {
                const double minutes = d / speed_m_per_min * rush_multiplier((t + 0.5) * 24.0 / P);
                ds.travel.values.at(i, j, t) = std::max(3.0, minutes);
            }
        }

    // overnight vehicles sit where the previous day's trips ended
    ds.presence_weights.resize(N);
    for (int i = 0; i < N; ++i) ds.presence_weights[i] = 0.45 / N + 0.55 * dst_n[i];

    // availability history: smooth AR(1) around a zone baseline with a
    // daily swing opposing local demand
    const int L = spec.history_days * P;
    ds.avail_history = Matrix(N, L);
    for (int i = 0; i < N; ++i) {
        Rng zr(derive(spec.seed, 0xab1eull, i));
        const double base = 2.0 + 40.0 * ds.presence_weights[i];
        double x = base;
        for (int t = 0; t < L; ++t) {
            const double hours = (t % P + 0.5) * 24.0 / P;
            const double target = base * (1.0 - 0.35 * (daily_profile(hours) - 0.4));
            x = target + 0.9 * (x - target) + 0.35 * zr.next_gaussian();
            ds.avail_history.at(i, t) = std::max(0.0, x);
        }
    }

    // interaction events for the kde demand predictor
    ds.events.resize(N);
    for (int i = 0; i < N; ++i) {
        Rng er(derive(spec.seed, 0xe4e27ull, i));
        for (int t = 0; t < P; ++t) {
            const long k = poisson(er, std::min(20.0, ds.activity.at(i, t)));
            for (long e = 0; e < k; ++e) ds.events[i].push_back(t + er.next_double());
        }
        if (ds.events[i].empty()) ds.events[i].push_back(12.0 * P / 24.0);
    }
    return ds;
}

CellDataset generate_cell_dataset(const CellSpec& spec) {
    CellDataset ds;
    // hexagonal ring polygon approximating a disc
    geo::Ring poly;
    const int sides = 18;
    for (int s = 0; s < sides; ++s) {
        const double a = 2.0 * 3.14159265358979 * s / sides;
        poly.push_back({spec.polygon_radius_m * std::cos(a), spec.polygon_radius_m * std::sin(a)});
    }
    ds.grid = hex::tessellate(poly, spec.side_m);
    ds.roads = hex::lattice_road_graph(ds.grid);
    const int C = ds.grid.size();
    const int P = spec.slots;
    if (C < 8) throw std::invalid_argument("cell dataset: polygon too small");

    Rng rng(derive(spec.seed, 0xce11ull));
    ds.pattern_of.resize(C);
    ds.cell_jitter.resize(C);
    for (int c = 0; c < C; ++c) {
        const double y = ds.grid.cell(c).center.y - spec.polygon_radius_m * 1.5;
        ds.pattern_of[c] = static_cast<int>(std::floor(y / spec.band_width_m)) & 1;
        ds.cell_jitter[c] = 1.0 + spec.jitter * (2.0 * rng.next_double() - 1.0);
    }

    // Two structurally different temporal patterns. Elastic warping can
    // align shifted peaks, so the patterns are separated by baseline level
    // and peak amplitude, not just peak time: commuter cells sit near zero
    // outside two sharp rushes, while the other band holds an elevated
    // all-day plateau.
    std::vector<std::vector<double>> demand_profile(2, std::vector<double>(P));
    std::vector<std::vector<double>> car_profile(2, std::vector<double>(P));
    for (int t = 0; t < P; ++t) {
        const double h = (t + 0.5) * 24.0 / P;
        demand_profile[0][t] = 0.02 + 1.3 * gauss_bump(h, 8.0, 1.2) + 0.5 * gauss_bump(h, 17.5, 1.5);
        demand_profile[1][t] = 0.18 + 0.25 * gauss_bump(h, 13.5, 3.0);
        car_profile[0][t] = 0.05 + 0.8 * gauss_bump(h, 2.5, 2.0);  // cars pool overnight
        car_profile[1][t] = 0.35 + 0.30 * gauss_bump(h, 15.0, 4.0);
    }

    ds.origin_rate = Matrix(C, P);
    ds.attract_rate = Matrix(C, P);
    for (int c = 0; c < C; ++c) {
        const int pc = ds.pattern_of[c];
        for (int t = 0; t < P; ++t) {
            ds.origin_rate.at(c, t) = ds.cell_jitter[c] * demand_profile[pc][t];
            // flows head to the opposite band
            ds.attract_rate.at(c, t) = demand_profile[1 - pc][t];
        }
    }

    ds.attrs.road_length.assign(C, 0.0);
    ds.attrs.car_series = Matrix(C, P);
    ds.attrs.act_series = Matrix(C, P);
    for (int c = 0; c < C; ++c) {
        double road = 0.0;
        for (int nb : ds.grid.cell(c).neighbor_ids)
            road += 0.5 * geo::dist(ds.grid.cell(c).center, ds.grid.cell(nb).center);
        ds.attrs.road_length[c] = road;
        Rng cr(derive(spec.seed, 0x5e12ull, c));
        const int pc = ds.pattern_of[c];
        for (int t = 0; t < P; ++t) {
            ds.attrs.act_series.at(c, t) =
                spec.pattern_contrast * ds.cell_jitter[c] * demand_profile[pc][t] +
                0.02 * cr.next_double();
            ds.attrs.car_series.at(c, t) =
                spec.pattern_contrast * ds.cell_jitter[c] * car_profile[pc][t] +
                0.02 * cr.next_double();
        }
    }

    // multi-day car-count history: the daily profile repeated with smooth noise
    const int L = spec.history_days * P;
    ds.car_history = Matrix(C, L);
    for (int c = 0; c < C; ++c) {
        Rng hr(derive(spec.seed, 0x41c7ull, c));
        double drift = 0.0;
        for (int t = 0; t < L; ++t) {
            drift = 0.85 * drift + 0.12 * hr.next_gaussian();
            ds.car_history.at(c, t) =
                std::max(0.0, ds.attrs.car_series.at(c, t % P) * (1.0 + 0.15 * drift) +
                                  0.05 * hr.next_gaussian());
        }
    }
    return ds;
}

ZoneDataset aggregate_cells(const CellDataset& cells, const std::vector<int>& zone_of,
                            int zone_count, const CellSpec& spec) {
    const int C = cells.grid.size();
    const int P = spec.slots;
    const int N = zone_count;
    if (static_cast<int>(zone_of.size()) != C)
        throw std::invalid_argument("aggregate_cells: partition size mismatch");

    // factored aggregation: flow(c,d,t) = origin[c][t] * attract[d][t] * decay(c,d)
    // grouped by (zone, pattern) so the tensor assembly is O(N^2 P)
    const int G = N * 2;
    Matrix w(G, G, 0.0);
    for (int c = 0; c < C; ++c) {
        const int gc = zone_of[c] * 2 + cells.pattern_of[c];
        for (int d = 0; d < C; ++d) {
            const double dist = std::max(500.0, geo::dist(cells.grid.cell(c).center,
                                                          cells.grid.cell(d).center));
            const double decay = 1000.0 / dist;
            w.at(gc, zone_of[d] * 2 + cells.pattern_of[d]) +=
                cells.cell_jitter[c] * decay;
        }
    }

    // per (pattern, t) rates are shared across cells up to jitter, folded above
    std::vector<std::vector<double>> opeak(2, std::vector<double>(P)), apeak(2, std::vector<double>(P));
    for (int t = 0; t < P; ++t) {
        // recover pattern-level rates from any representative cells
        opeak[0][t] = opeak[1][t] = apeak[0][t] = apeak[1][t] = 0.0;
    }
    for (int p = 0; p < 2; ++p) {
        int rep = -1;
        for (int c = 0; c < C; ++c)
            if (cells.pattern_of[c] == p) {
                rep = c;
                break;
            }
        if (rep < 0) continue;
        for (int t = 0; t < P; ++t) {
            opeak[p][t] = cells.origin_rate.at(rep, t) / cells.cell_jitter[rep];
            apeak[p][t] = cells.attract_rate.at(rep, t);
        }
    }

    ZoneDataset ds;
    ds.trips = Tensor3(N, N, P);
    double raw_total = 0.0;
    for (int z1 = 0; z1 < N; ++z1)
        for (int z2 = 0; z2 < N; ++z2)
            for (int t = 0; t < P; ++t) {
                double f = 0.0;
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb)
                        f += opeak[pa][t] * apeak[pb][t] * w.at(z1 * 2 + pa, z2 * 2 + pb);
                ds.trips.at(z1, z2, t) = f;
                raw_total += f;
            }
    const double scale = raw_total > 0 ? spec.daily_demand / raw_total : 0.0;
    for (double& x : ds.trips.v) x *= scale;

    ds.activity = Matrix(N, P);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < P; ++t) {
            double row = 0.0;
            for (int j = 0; j < N; ++j) row += ds.trips.at(i, j, t);
            ds.activity.at(i, t) = spec.delta_target * row;
        }

    ds.centroids.assign(N, {0.0, 0.0});
    std::vector<int> counts(N, 0);
    for (int c = 0; c < C; ++c) {
        ds.centroids[zone_of[c]].x += cells.grid.cell(c).center.x;
        ds.centroids[zone_of[c]].y += cells.grid.cell(c).center.y;
        counts[zone_of[c]]++;
    }
    for (int z = 0; z < N; ++z)
        if (counts[z] > 0) {
            ds.centroids[z].x /= counts[z];
            ds.centroids[z].y /= counts[z];
        }

    const double speed_m_per_min = spec.mean_speed_kmh * 1000.0 / 60.0;
    ds.travel.values = Tensor3(N, N, P);
    ds.travel.horizon = P;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double d = std::max(500.0, geo::dist(ds.centroids[i], ds.centroids[j]));
            for (int t = 0; t < P; ++t)
                ds.travel.values.at(i, j, t) =
                    std::max(2.0, d / speed_m_per_min * rush_multiplier((t + 0.5) * 24.0 / P));
        }

    ds.presence_weights.assign(N, 0.0);
    for (int z = 0; z < N; ++z) ds.presence_weights[z] = std::max(1, counts[z]);

    // short availability history so buffer-based predictors can seed
    ds.avail_history = Matrix(N, 2 * P);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < 2 * P; ++t) ds.avail_history.at(i, t) = 4.0;
    ds.events.resize(N);
    for (int i = 0; i < N; ++i) ds.events[i].push_back(34.0);
    return ds;
}

}  // namespace relo::synth
