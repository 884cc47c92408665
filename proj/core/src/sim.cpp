#include "relo/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "relo/csv.hpp"

namespace relo::sim {

long SimState::idle_vehicles() const {
    return std::accumulate(x_v.begin(), x_v.end(), 0L);
}

long SimState::idle_staff() const {
    return std::accumulate(x_s.begin(), x_s.end(), 0L);
}

long SimState::scheduled_vehicles(int after_slot) const {
    long n = 0;
    for (size_t s = after_slot + 1; s < arrivals_v.size(); ++s)
        for (long c : arrivals_v[s]) n += c;
    return n;
}

long SimState::scheduled_staff(int after_slot) const {
    long n = 0;
    for (size_t s = after_slot + 1; s < arrivals_s.size(); ++s)
        for (long c : arrivals_s[s]) n += c;
    return n;
}

double score(const DecisionLog& log, const demand::TravelTimeTensor& T, int H) {
    double minutes = 0.0;
    for (const auto& [key, count] : log.trips)
        minutes += count * demand::effective_travel_time(T, key[0], key[1], key[2], H);
    return minutes / 60.0;
}

Metrics compute_metrics(const DecisionLog& log, const demand::TravelTimeTensor& T, int H) {
    Metrics m;
    auto tally = [&](const std::map<DecisionLog::Key, long>& entries, long& n, double& hours) {
        for (const auto& [key, count] : entries) {
            n += count;
            hours += count * demand::effective_travel_time(T, key[0], key[1], key[2], H) / 60.0;
        }
    };
    tally(log.trips, m.trips, m.trip_time);
    tally(log.relocations, m.relocations, m.reloc_time);
    tally(log.transits, m.transits, m.transit_time);
    return m;
}

std::vector<long> sample_assignments(std::span<const long> demand_row, long vehicles, Rng& rng,
                                     std::span<const int> visit) {
    const int n = static_cast<int>(demand_row.size());
    std::vector<long> served(n, 0);
    long total = 0;
    for (long d : demand_row) total += d;
    if (total <= 0 || vehicles <= 0) return served;
    if (vehicles >= total) {
        std::copy(demand_row.begin(), demand_row.end(), served.begin());
        return served;
    }
    // k sequential draws without replacement from the demand multiset
    std::vector<double> rem(demand_row.begin(), demand_row.end());
    double rem_total = static_cast<double>(total);
    for (long k = 0; k < vehicles; ++k) {
        const int j = categorical(rng, rem, rem_total, visit);
        served[j] += 1;
        rem[j] -= 1.0;
        rem_total -= 1.0;
    }
    return served;
}

namespace {

int stream_of(const SimInputs& in, int zone) {
    return in.zone_stream_ids.empty() ? zone : in.zone_stream_ids[zone];
}

}  // namespace

void step_assignment(SimState& state, const demand::Scenario& sc, const SimInputs& in, int t,
                     DecisionLog& log, Metrics& metrics) {
    const int N = state.zones();
    const demand::TravelTimeTensor& T = *in.travel;

    // materialize arrivals due at t
    for (int i = 0; i < N; ++i) {
        state.x_v[i] += state.arrivals_v[t][i];
        state.arrivals_v[t][i] = 0;
        state.x_s[i] += state.arrivals_s[t][i];
        state.arrivals_s[t][i] = 0;
    }

    // destination visit order fixed by stream ids
    std::vector<int> visit;
    if (!in.zone_stream_ids.empty()) {
        visit.resize(N);
        std::iota(visit.begin(), visit.end(), 0);
        std::sort(visit.begin(), visit.end(), [&](int a, int b) {
            return in.zone_stream_ids[a] < in.zone_stream_ids[b];
        });
    }

    std::vector<long> row(N);
    for (int i = 0; i < N; ++i) {
        long total = 0;
        for (int j = 0; j < N; ++j) {
            row[j] = sc.demand[sc.idx(i, j, t - 1)];
            total += row[j];
        }
        if (total == 0) continue;
        Rng rng(derive(sc.seed, static_cast<uint64_t>(t), 0xa551ull,
                       static_cast<uint64_t>(stream_of(in, i))));
        const auto served = sample_assignments(row, state.x_v[i], rng, visit);
        long k = 0;
        for (int j = 0; j < N; ++j) {
            if (served[j] == 0) continue;
            k += served[j];
            log.trips[{i, j, t}] += served[j];
            const int arrive = t + demand::duration_slots(T.at(i, j, t));
            state.schedule_vehicles(arrive, j, served[j]);
        }
        state.x_v[i] -= k;
        metrics.unmet_demand += total - k;
    }
}

RunResult run_scenario(const demand::Scenario& sc, const SimInputs& in, Policy* policy,
                       const RunOptions& opt) {
    if (!in.travel) throw std::invalid_argument("run_scenario: travel tensor required");
    const int N = sc.zones;
    const int H = in.horizon;

    // queues sized for the longest possible trip scheduled at slot H
    int max_dur = 1;
    for (double minutes : in.travel->values.v)
        max_dur = std::max(max_dur, demand::duration_slots(minutes));
    const int q = H + max_dur + 1;

    RunResult res;
    SimState st;
    st.x_v = sc.vehicles0;
    st.x_s = sc.staff0;
    st.arrivals_v.assign(q + 1, std::vector<long>(N, 0));
    st.arrivals_s.assign(q + 1, std::vector<long>(N, 0));
    st.pending_intent.assign(q + 1, std::vector<long>(N, 0));

    const long fleet = st.idle_vehicles();
    const long staff = st.idle_staff();

    if (policy) policy->begin_scenario(in, sc);

    for (int t = 1; t <= H; ++t) {
        st.t = t;
        step_assignment(st, sc, in, t, res.log, res.metrics);

        // transit conflicts: intent matured but the vehicles are gone
        for (int i = 0; i < N; ++i) {
            const long intents = st.pending_intent[t][i];
            if (intents > 0 && st.x_v[i] == 0) res.metrics.conflicts += intents;
            st.pending_intent[t][i] = 0;
        }

        if (policy) {
            if (opt.time_policy) {
                const auto t0 = std::chrono::steady_clock::now();
                policy->decide(st, res.log, t);
                res.policy_seconds +=
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            } else {
                policy->decide(st, res.log, t);
            }
        }

        if (opt.check_conservation) {
            if (st.idle_vehicles() + st.scheduled_vehicles(t) != fleet) res.conservation_violations++;
            if (st.idle_staff() + st.scheduled_staff(t) != staff) res.conservation_violations++;
        }
    }

    const Metrics counted = compute_metrics(res.log, *in.travel, H);
    res.metrics.trips = counted.trips;
    res.metrics.trip_time = counted.trip_time;
    res.metrics.relocations = counted.relocations;
    res.metrics.reloc_time = counted.reloc_time;
    res.metrics.transits = counted.transits;
    res.metrics.transit_time = counted.transit_time;
    if (policy) res.budget_exceeded = policy->budget_exceeded();
    return res;
}

SaaResult run_saa(const demand::ScenarioSampler& sampler, int n, const PolicyFactory& make_policy,
                  long fleet, long staff, uint64_t seed, const SimInputs& in, int threads,
                  const RunOptions& opt) {
    if (n < 1) throw std::invalid_argument("run_saa: need at least one scenario");
    SaaResult out;
    out.per_scenario.resize(n);
    out.policy_seconds.resize(n, 0.0);
    std::vector<long> violations(n, 0);
    std::vector<uint8_t> budget(n, 0);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= n) return;
            const demand::Scenario sc = sampler.sample(fleet, staff, derive(seed, idx));
            std::unique_ptr<Policy> policy = make_policy ? make_policy() : nullptr;
            const RunResult r = run_scenario(sc, in, policy.get(), opt);
            out.per_scenario[idx] = r.metrics;
            out.policy_seconds[idx] = r.policy_seconds;
            violations[idx] = r.conservation_violations;
            budget[idx] = r.budget_exceeded ? 1 : 0;
        }
    };

    const int nw = std::max(1, std::min(threads, n));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // order-independent aggregation: reduce by scenario index
    double sum = 0.0;
    for (const auto& m : out.per_scenario) sum += m.trip_time;
    out.mean_score = sum / n;
    double var = 0.0;
    for (const auto& m : out.per_scenario)
        var += (m.trip_time - out.mean_score) * (m.trip_time - out.mean_score);
    out.std_score = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    for (long v : violations) out.conservation_violations += v;
    for (uint8_t b : budget) out.budget_exceeded |= (b != 0);
    return out;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<Metrics>& rows,
                       const std::string& policy_id, uint64_t base_seed) {
    csv::Writer w(path);
    w.raw_line(
        "scenario,policy,seed,trips,trip_time_h,relocations,reloc_time_h,transits,transit_time_h,"
        "conflicts,unmet_demand");
    for (size_t s = 0; s < rows.size(); ++s) {
        const Metrics& m = rows[s];
        w.row({std::to_string(s), policy_id, std::to_string(derive(base_seed, s)),
               std::to_string(m.trips), csv::fmt(m.trip_time, 4), std::to_string(m.relocations),
               csv::fmt(m.reloc_time, 4), std::to_string(m.transits), csv::fmt(m.transit_time, 4),
               std::to_string(m.conflicts), std::to_string(m.unmet_demand)});
    }
}

void write_decision_log_csv(const std::filesystem::path& path, const DecisionLog& log) {
    csv::Writer w(path);
    w.raw_line("kind,i,j,t,count");
    auto dump = [&](const char* kind, const std::map<DecisionLog::Key, long>& entries) {
        for (const auto& [key, count] : entries)
            w.row({kind, std::to_string(key[0]), std::to_string(key[1]), std::to_string(key[2]),
                   std::to_string(count)});
    };
    dump("u_v", log.trips);
    dump("u_r", log.relocations);
    dump("u_t", log.transits);
}

}  // namespace relo::sim
