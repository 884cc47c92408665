#include "relo/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relo/csv.hpp"
#include "relo/rng.hpp"

namespace relo::tune {

double tuning_objective(const std::vector<sim::Metrics>& batch, double penalty) {
    if (batch.empty()) throw std::invalid_argument("tuning_objective: empty batch");
    double t_mean = 0.0, r_mean = 0.0, tr_mean = 0.0;
    for (const auto& m : batch) {
        t_mean += m.trip_time;
        r_mean += static_cast<double>(m.relocations);
        tr_mean += static_cast<double>(m.transits);
    }
    const double n = static_cast<double>(batch.size());
    return t_mean / n - penalty * std::abs(r_mean / n - tr_mean / n);
}

namespace {

policy::RelocParams sample_point(const SearchSpace& s, Rng& rng) {
    policy::RelocParams p;
    const double lo = std::log(s.w_tt_lo), hi = std::log(s.w_tt_hi);
    p.w_tt = std::exp(lo + (hi - lo) * rng.next_double());
    p.w_d = s.w_d_lo + (s.w_d_hi - s.w_d_lo) * rng.next_double();
    p.r_th = s.r_th_lo + (s.r_th_hi - s.r_th_lo) * rng.next_double();
    return p;
}

constexpr double kGolden = 0.6180339887498949;

}  // namespace

SearchResult search(const SearchSpace& space, int budget, Strategy strategy, const EvalFn& eval,
                    uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("search: budget must be >= 1");
    SearchResult out;
    Rng rng(derive(seed, 0x5ea7c4ull));

    auto record = [&](const policy::RelocParams& p) {
        Trial tr;
        tr.index = static_cast<int>(out.history.size());
        tr.params = p;
        tr.objective = eval(p);
        out.history.push_back(tr);
        if (out.history.size() == 1 || tr.objective.value > out.best.objective.value)
            out.best = tr;
        return tr.objective.value;
    };

    const int explore =
        strategy == Strategy::random ? budget : std::max(1, budget * 2 / 5);
    for (int i = 0; i < explore && static_cast<int>(out.history.size()) < budget; ++i)
        record(sample_point(space, rng));

    if (strategy == Strategy::coordinate_refine) {
        // golden-section passes, one dimension at a time, around the incumbent
        int dim = 0;
        while (static_cast<int>(out.history.size()) < budget) {
            policy::RelocParams base = out.best.params;
            double lo, hi;
            const bool log_axis = dim == 0;
            switch (dim) {
                case 0: lo = std::log(space.w_tt_lo); hi = std::log(space.w_tt_hi); break;
                case 1: lo = space.w_d_lo; hi = space.w_d_hi; break;
                default: lo = space.r_th_lo; hi = space.r_th_hi; break;
            }
            auto probe = [&](double x) {
                policy::RelocParams p = base;
                const double v = log_axis ? std::exp(x) : x;
                if (dim == 0) p.w_tt = v;
                else if (dim == 1) p.w_d = v;
                else p.r_th = v;
                return record(p);
            };
            double a = lo, b = hi;
            double x1 = b - kGolden * (b - a);
            double x2 = a + kGolden * (b - a);
            double f1 = probe(x1);
            if (static_cast<int>(out.history.size()) >= budget) break;
            double f2 = probe(x2);
            while (static_cast<int>(out.history.size()) < budget && (b - a) > 1e-3 * (hi - lo)) {
                if (f1 >= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - kGolden * (b - a);
                    f1 = probe(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (b - a);
                    f2 = probe(x2);
                }
            }
            dim = (dim + 1) % 3;
        }
    }
    return out;
}

void write_history_csv(const std::filesystem::path& path, const SearchResult& sr) {
    csv::Writer w(path);
    w.raw_line("trial,w_tt,w_d,r_th,objective,t_mean,relocations,transits");
    for (const auto& tr : sr.history)
        w.row({std::to_string(tr.index), csv::fmt(tr.params.w_tt), csv::fmt(tr.params.w_d),
               csv::fmt(tr.params.r_th), csv::fmt(tr.objective.value), csv::fmt(tr.objective.t_mean),
               csv::fmt(tr.objective.relocations), csv::fmt(tr.objective.transits)});
}

}  // namespace relo::tune
