#include "relo/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "relo/dtw.hpp"

namespace relo::demand {

Tensor3 smooth_trips(const Tensor3& trips, double* alpha_out) {
    const double alpha = 0.1 * trips.min_positive();  // throws on all-zero
    Tensor3 out = trips;
    for (double& x : out.v) x += alpha;
    if (alpha_out) *alpha_out = alpha;
    return out;
}

LambdaTensor calibrate_lambda(const Tensor3& smoothed_trips, const Matrix& activity, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("calibrate_lambda: delta must be positive");
    const int N = smoothed_trips.n1;
    const int H = smoothed_trips.n3;
    if (smoothed_trips.n2 != N)
        throw std::invalid_argument("calibrate_lambda: trips tensor must be square in zones");
    if (activity.rows != N || activity.cols != H)
        throw std::invalid_argument("calibrate_lambda: activity dimensions mismatch");

    LambdaTensor lt;
    lt.delta = delta;
    lt.values = Tensor3(N, N, H);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < H; ++t) {
            double row_sum = 0.0;
            for (int j = 0; j < N; ++j) row_sum += smoothed_trips.at(i, j, t);
            if (row_sum <= 0.0)
                throw std::invalid_argument("calibrate_lambda: zero trip row; smooth first");
            const double factor = activity.at(i, t) / (delta * row_sum);
            for (int j = 0; j < N; ++j) lt.values.at(i, j, t) = factor * smoothed_trips.at(i, j, t);
        }
    return lt;
}

std::vector<DeltaScore> select_delta(std::span<const double> activity_total,
                                     std::span<const double> trips_total,
                                     std::span<const double> candidates) {
    if (activity_total.size() != trips_total.size())
        throw std::invalid_argument("select_delta: series length mismatch");
    const size_t n = trips_total.size();
    double mean = 0.0;
    for (double x : trips_total) mean += x;
    mean /= n;
    double ss_tot = 0.0;
    for (double x : trips_total) ss_tot += (x - mean) * (x - mean);

    std::vector<DeltaScore> out;
    std::vector<double> scaled(n);
    for (double delta : candidates) {
        DeltaScore s;
        s.delta = delta;
        for (size_t k = 0; k < n; ++k) scaled[k] = activity_total[k] / delta;
        double ss_res = 0.0;
        for (size_t k = 0; k < n; ++k)
            ss_res += (trips_total[k] - scaled[k]) * (trips_total[k] - scaled[k]);
        if (ss_tot > 0.0) s.r2 = 1.0 - ss_res / ss_tot;
        s.dtw = dtw(scaled, trips_total);
        out.push_back(s);
    }
    return out;
}

int duration_slots(double minutes) {
    return std::max(1, static_cast<int>(std::ceil(minutes / kSlotMinutes)));
}

double effective_travel_time(const TravelTimeTensor& T, int i, int j, int t, int H) {
    const double minutes = T.at(i, j, t);
    if (t + static_cast<int>(std::ceil(minutes / kSlotMinutes)) < H) return minutes;
    return (H - t) * kSlotMinutes;
}

Tensor3 impute_travel_times(const MaskedTensor3& raw, const Matrix* zone_distances,
                            double mean_speed_m_per_min) {
    const int N = raw.values.n1;
    const int P = raw.values.n3;
    Tensor3 out = raw.values;

    double global_sum = 0.0;
    long global_cnt = 0;
    for (size_t k = 0; k < raw.present.size(); ++k)
        if (raw.present[k]) {
            global_sum += raw.values.v[k];
            ++global_cnt;
        }
    const double global_mean = global_cnt > 0 ? global_sum / global_cnt : kSlotMinutes;

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double pair_sum = 0.0;
            int pair_cnt = 0;
            for (int t = 0; t < P; ++t)
                if (raw.has(i, j, t)) {
                    pair_sum += raw.values.at(i, j, t);
                    ++pair_cnt;
                }
            double fallback;
            if (pair_cnt > 0) {
                fallback = pair_sum / pair_cnt;
            } else if (zone_distances && mean_speed_m_per_min > 0.0) {
                fallback = std::max(1.0, zone_distances->at(i, j) / mean_speed_m_per_min);
            } else {
                fallback = global_mean;
            }
            for (int t = 0; t < P; ++t)
                if (!raw.has(i, j, t)) out.at(i, j, t) = fallback;
        }
    return out;
}

ScenarioSampler::ScenarioSampler(const LambdaTensor& lambda, std::vector<double> presence_weights,
                                 std::vector<int> stream_ids)
    : lambda_(lambda), presence_(std::move(presence_weights)), stream_ids_(std::move(stream_ids)) {
    const int N = lambda.zones();
    if (static_cast<int>(presence_.size()) != N)
        throw std::invalid_argument("sampler: presence weights size mismatch");
    if (stream_ids_.empty()) {
        stream_ids_.resize(N);
        std::iota(stream_ids_.begin(), stream_ids_.end(), 0);
    }
    exp_neg_.resize(lambda.values.v.size(), 0.0);
    for (size_t k = 0; k < exp_neg_.size(); ++k) {
        const double l = lambda.values.v[k];
        exp_neg_[k] = l < 10.0 ? std::exp(-l) : 0.0;
    }
    placement_order_.resize(N);
    std::iota(placement_order_.begin(), placement_order_.end(), 0);
    std::sort(placement_order_.begin(), placement_order_.end(),
              [&](int a, int b) { return stream_ids_[a] < stream_ids_[b]; });
}

Scenario ScenarioSampler::sample(long fleet, long staff, uint64_t seed) const {
    if (fleet < 0 || staff < 0) throw std::invalid_argument("sampler: negative counts");
    const int N = lambda_.zones();
    const int H = lambda_.horizon();
    Scenario sc;
    sc.seed = seed;
    sc.zones = N;
    sc.horizon = H;
    sc.demand.assign(static_cast<size_t>(N) * N * H, 0);

    // one stream per (slot, origin); destinations are visited in stream-id
    // order so a relabeled problem consumes draws identically
    for (int t = 0; t < H; ++t)
        for (int i = 0; i < N; ++i) {
            Rng rng(derive(seed, static_cast<uint64_t>(t) + 1, 0x11aeull,
                           static_cast<uint64_t>(stream_ids_[i])));
            for (int j : placement_order_) {
                const size_t k = lambda_.values.idx(i, j, t);
                const double l = lambda_.values.v[k];
                long c;
                if (l < 10.0)
                    c = poisson_inv(rng, l, exp_neg_[k]);
                else
                    c = poisson(rng, l);
                sc.demand[sc.idx(i, j, t)] = c;
            }
        }

    // initial placements: vehicles by historical presence, staff uniform;
    // zones visited in stream-id order so relabeling commutes with sampling
    Rng veh_rng(derive(seed, 0x7e81ull));
    sc.vehicles0.assign(N, 0);
    {
        double total = 0.0;
        for (double w : presence_) total += w;
        if (total <= 0.0) throw std::invalid_argument("sampler: nonpositive presence weights");
        for (long v = 0; v < fleet; ++v)
            sc.vehicles0[categorical(veh_rng, presence_, total, placement_order_)] += 1;
    }
    Rng staff_rng(derive(seed, 0x57a4ull));
    sc.staff0.assign(N, 0);
    {
        std::vector<double> uni(N, 1.0);
        for (long s = 0; s < staff; ++s)
            sc.staff0[categorical(staff_rng, uni, static_cast<double>(N), placement_order_)] += 1;
    }
    return sc;
}

void write_scenario_json(const std::filesystem::path& path, const Scenario& sc) {
    nlohmann::json j;
    j["seed"] = sc.seed;
    j["zones"] = sc.zones;
    j["horizon"] = sc.horizon;
    j["vehicles0"] = sc.vehicles0;
    j["staff0"] = sc.staff0;
    nlohmann::json d = nlohmann::json::array();
    for (int i = 0; i < sc.zones; ++i)
        for (int jj = 0; jj < sc.zones; ++jj)
            for (int t = 0; t < sc.horizon; ++t) {
                const long c = sc.demand[sc.idx(i, jj, t)];
                if (c > 0) d.push_back({i, jj, t + 1, c});
            }
    j["demand"] = std::move(d);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump() << "\n";
}

Scenario read_scenario_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    Scenario sc;
    sc.seed = j.at("seed").get<uint64_t>();
    sc.zones = j.at("zones").get<int>();
    sc.horizon = j.at("horizon").get<int>();
    sc.vehicles0 = j.at("vehicles0").get<std::vector<long>>();
    sc.staff0 = j.at("staff0").get<std::vector<long>>();
    sc.demand.assign(static_cast<size_t>(sc.zones) * sc.zones * sc.horizon, 0);
    for (const auto& row : j.at("demand"))
        sc.demand[sc.idx(row[0].get<int>(), row[1].get<int>(), row[2].get<int>() - 1)] =
            row[3].get<long>();
    return sc;
}

}  // namespace relo::demand
