#include "relo/relocation.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace relo::policy {

std::vector<double> imbalance(std::span<const double> x_hat, std::span<const double> p_hat,
                              double w_d) {
    if (x_hat.size() != p_hat.size()) throw std::invalid_argument("imbalance: size mismatch");
    std::vector<double> u(x_hat.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = x_hat[i] - w_d * p_hat[i];
    return u;
}

std::vector<double> relocation_ranking(std::span<const double> U, std::span<const double> t_row,
                                       double w_tt) {
    std::vector<double> r(U.size());
    for (size_t j = 0; j < r.size(); ++j) r[j] = U[j] + w_tt * t_row[j];
    return r;
}

std::vector<double> transit_ranking(std::span<const double> U, std::span<const double> t_row,
                                    double w_tt) {
    std::vector<double> r(U.size());
    for (size_t j = 0; j < r.size(); ++j) r[j] = U[j] - w_tt * t_row[j];
    return r;
}

namespace {

// ties broken by lowest zone index; `self` excluded
int argmin_excluding(const std::vector<double>& v, int self) {
    int best = -1;
    for (int j = 0; j < static_cast<int>(v.size()); ++j) {
        if (j == self) continue;
        if (best < 0 || v[j] < v[best]) best = j;
    }
    return best;
}

int argmax_excluding(const std::vector<double>& v, int self) {
    int best = -1;
    for (int j = 0; j < static_cast<int>(v.size()); ++j) {
        if (j == self) continue;
        if (best < 0 || v[j] > v[best]) best = j;
    }
    return best;
}

}  // namespace

long schedule_relocation(sim::SimState& st, const demand::TravelTimeTensor& T,
                         const RelocParams& p, int t, std::vector<double>& U,
                         sim::DecisionLog& log) {
    const int N = st.zones();
    long scheduled = 0;
    std::vector<double> t_row(N), r_r;
    for (int i = 0; i < N; ++i) {
        if (st.x_s[i] == 0 || st.x_v[i] == 0) continue;
        if (U[i] < p.r_th) continue;  // source gate: deficit zones keep their cars

        for (int j = 0; j < N; ++j) t_row[j] = T.at(i, j, t);
        r_r = relocation_ranking(U, t_row, p.w_tt);
        const long cap = std::min(st.x_v[i], st.x_s[i]);
        for (long k = 0; k < cap; ++k) {
            const int dest = argmin_excluding(r_r, i);
            if (dest < 0) break;
            log.relocations[{i, dest, t}] += 1;
            if (p.paper_literal_update) {
                r_r[dest] -= 1.0;
            } else {
                r_r[dest] += 1.0;  // the incoming vehicle shrinks the deficit
                U[dest] += 1.0;
            }
            const int arrive = t + demand::duration_slots(T.at(i, dest, t));
            st.schedule_vehicles(arrive, dest);
            st.schedule_staff(arrive, dest, false);
            st.x_v[i] -= 1;
            st.x_s[i] -= 1;
            ++scheduled;
        }
    }
    return scheduled;
}

long schedule_transits(sim::SimState& st, const demand::TravelTimeTensor& T, const RelocParams& p,
                       int t, std::vector<double>& U, sim::DecisionLog& log) {
    const int N = st.zones();
    long scheduled = 0;
    std::vector<double> t_row(N), r_t;
    for (int i = 0; i < N; ++i) {
        if (st.x_s[i] == 0) continue;
        if (st.x_v[i] > 0 && U[i] >= p.r_th) continue;  // relocatable surplus stays staffed

        for (int j = 0; j < N; ++j) t_row[j] = p.scooter_factor * T.at(i, j, t);
        r_t = transit_ranking(U, t_row, p.w_tt);
        const long idle = st.x_s[i];
        for (long k = 0; k < idle; ++k) {
            const int dest = argmax_excluding(r_t, i);
            if (dest < 0 || r_t[dest] <= U[i]) break;  // moving must improve prospects
            log.transits[{i, dest, t}] += 1;
            r_t[dest] -= 1.0;
            U[dest] -= 1.0;
            const int arrive = t + demand::duration_slots(p.scooter_factor * T.at(i, dest, t));
            st.schedule_staff(arrive, dest, true);
            st.x_s[i] -= 1;
            ++scheduled;
        }
    }
    return scheduled;
}

RankingPolicy::RankingPolicy(RelocParams params, PredictorSet predictors)
    : params_(params), pred_(std::move(predictors)) {
    if (!pred_.availability || !pred_.demand_density)
        throw std::invalid_argument("ranking policy: predictors required");
}

void RankingPolicy::begin_scenario(const sim::SimInputs& in, const demand::Scenario& sc) {
    travel_ = in.travel;
    x_obs_.assign(sc.zones, 0.0);
}

void RankingPolicy::decide(sim::SimState& state, sim::DecisionLog& log, int t) {
    const int N = state.zones();
    for (int i = 0; i < N; ++i) x_obs_[i] = static_cast<double>(state.x_v[i]);
    pred_.availability->observe(x_obs_);

    const auto x_hat = pred_.availability->predict();
    const auto p_hat = pred_.demand_density->predict(t + params_.h);
    U_ = imbalance(x_hat, p_hat, params_.w_d);

    schedule_relocation(state, *travel_, params_, t, U_, log);
    schedule_transits(state, *travel_, params_, t, U_, log);
}

}  // namespace relo::policy
