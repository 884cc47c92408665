#pragma once

#include <memory>
#include <span>
#include <vector>

#include "relo/predictors.hpp"
#include "relo/sim.hpp"

namespace relo::policy {

struct RelocParams {
    double w_tt = 0.07;    // trip time weight, per minute
    double w_d = 280.32;   // demand weight (scale matcher)
    double r_th = -17.35;  // relocation threshold, vehicles
    int h = 2;             // prediction horizon in slots

    bool paper_literal_update = false;  // destination score update variant
    double scooter_factor = 1.0;        // scooter time = factor * car time
};

// U[i] = predicted vehicles minus weighted demand density.
std::vector<double> imbalance(std::span<const double> x_hat, std::span<const double> p_hat,
                              double w_d);

// R_r[j] = U[j] + w_tt * T_row[j]; the best relocation target is the argmin.
std::vector<double> relocation_ranking(std::span<const double> U, std::span<const double> t_row,
                                       double w_tt);

// R_t[j] = U[j] - w_tt * T_row[j]; the best transit target is the argmax.
std::vector<double> transit_ranking(std::span<const double> U, std::span<const double> t_row,
                                    double w_tt);

// Greedy relocation pass over zones with idle staff and vehicles. Skips
// sources with U below the threshold; each pick books one vehicle plus one
// staff member onto the current best target and bumps that target's score.
// U is carried forward (updated in place). Returns relocations scheduled.
long schedule_relocation(sim::SimState& st, const demand::TravelTimeTensor& T,
                         const RelocParams& p, int t, std::vector<double>& U,
                         sim::DecisionLog& log);

// Scooter pass for zones whose staff have nothing left to relocate: sends
// each idle staff member to the best surplus zone, provided moving beats
// staying (R_t[dest] > U[i]). Returns transits scheduled.
long schedule_transits(sim::SimState& st, const demand::TravelTimeTensor& T, const RelocParams& p,
                       int t, std::vector<double>& U, sim::DecisionLog& log);

// Predictor pair consumed by the policies.
struct PredictorSet {
    std::shared_ptr<pred::AvailabilityPredictor> availability;
    std::shared_ptr<pred::DemandPredictor> demand_density;
};

// The ranking-based policy: predict, compute imbalance, then the two
// greedy passes.
class RankingPolicy : public sim::Policy {
public:
    RankingPolicy(RelocParams params, PredictorSet predictors);

    std::string id() const override { return "ranking"; }
    void begin_scenario(const sim::SimInputs& in, const demand::Scenario& sc) override;
    void decide(sim::SimState& state, sim::DecisionLog& log, int t) override;

    // most recent imbalance vector (after both passes), for inspection
    const std::vector<double>& last_imbalance() const { return U_; }

private:
    RelocParams params_;
    PredictorSet pred_;
    const demand::TravelTimeTensor* travel_ = nullptr;
    std::vector<double> U_;
    std::vector<double> x_obs_;
};

}  // namespace relo::policy
