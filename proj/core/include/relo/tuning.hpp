#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "relo/relocation.hpp"
#include "relo/sim.hpp"

namespace relo::tune {

struct SearchSpace {
    double w_tt_lo = 1e-4, w_tt_hi = 1.0;    // searched log-uniformly
    double w_d_lo = 20.0, w_d_hi = 1000.0;
    double r_th_lo = -30.0, r_th_hi = 30.0;
};

// t_mean - penalty * |relocations - transits|, all per-scenario means.
double tuning_objective(const std::vector<sim::Metrics>& batch, double penalty = 10.0);

struct Objective {
    double value = 0.0;
    double t_mean = 0.0;
    double relocations = 0.0;
    double transits = 0.0;
};

struct Trial {
    int index = 0;
    policy::RelocParams params;
    Objective objective;
};

enum class Strategy { random, coordinate_refine };

// Evaluation runs an SAA batch; callers inject it so the batch can share
// one fixed scenario set across all trials (common random numbers).
using EvalFn = std::function<Objective(const policy::RelocParams&)>;

struct SearchResult {
    Trial best;
    std::vector<Trial> history;  // length == budget
};

SearchResult search(const SearchSpace& space, int budget, Strategy strategy, const EvalFn& eval,
                    uint64_t seed);

void write_history_csv(const std::filesystem::path& path, const SearchResult& sr);

}  // namespace relo::tune
