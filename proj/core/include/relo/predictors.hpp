#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "relo/tensor.hpp"

namespace relo::pred {

enum class Penalty { l1, l2 };

// Least-squares autoregression fit: target y_{q} from the `window`
// observations ending `horizon` steps earlier. Returns the intercept
// followed by one coefficient per lag (lag 0 = most recent observation).
// l2 solves the ridge normal equations; l1 runs cyclic coordinate descent
// to 1e-6 coefficient tolerance (at most 1e4 sweeps).
// Throws on singular designs when strength == 0.
std::vector<double> fit_linear(std::span<const double> history, int window, int horizon,
                               Penalty penalty, double strength);

double predict_linear(std::span<const double> recent, std::span<const double> coef);

enum class AvailabilityKind { last, moving_average, linear_l1, linear_l2 };

struct PredictorConfig {
    AvailabilityKind kind = AvailabilityKind::last;
    int window = 672;       // history consumed per prediction (ma width or lag count)
    int horizon = 2;        // slots ahead
    double strength = 1.0;  // regularization
};

// Per-zone history ring, pre-seeded from historical series and extended
// with simulated observations each slot.
class SeriesBuffer {
public:
    SeriesBuffer(int zones, int capacity);

    void seed(int zone, std::span<const double> history);
    void push(int zone, double value);
    int length(int zone) const;
    // last `count` observations of a zone, oldest first
    std::vector<double> tail(int zone, int count) const;

private:
    int capacity_;
    std::vector<std::vector<double>> data_;  // plain vectors with front-trim
};

// Availability predictor over a SeriesBuffer. Linear kinds require
// fitted coefficients (one vector per zone).
class AvailabilityPredictor {
public:
    AvailabilityPredictor(PredictorConfig cfg, int zones, int buffer_capacity);

    void seed_history(int zone, std::span<const double> history);
    void fit(const Matrix& zone_history);  // trains linear kinds per zone
    void set_coefficients(int zone, std::vector<double> coef);
    const std::vector<double>& coefficients(int zone) const;

    void observe(std::span<const double> x_v);  // one value per zone
    // predicted vehicle count per zone at now + cfg.horizon, clamped at >= 0
    std::vector<double> predict() const;

    const PredictorConfig& config() const { return cfg_; }

private:
    PredictorConfig cfg_;
    int zones_;
    SeriesBuffer buffer_;
    std::vector<std::vector<double>> coef_;
};

// Gaussian-kernel density over time-of-day slot positions of events,
// normalized so the whole day integrates to one. Bandwidth in slots.
// Throws when a zone has no events.
std::vector<double> kde_day_density(std::span<const double> event_slots, int slots_per_day,
                                    double bandwidth);

enum class DemandMode { lambda_baseline, kde };

// Demand-density predictor: either the Lambda row sum at the queried slot
// or a per-zone KDE of historical event times.
class DemandPredictor {
public:
    static DemandPredictor lambda_baseline(const Tensor3* lambda);
    static DemandPredictor kde(const std::vector<std::vector<double>>& events_per_zone,
                               int slots_per_day, double bandwidth);

    // predicted density per zone at 1-based slot `t_plus_h` (clamped to the
    // tensor horizon / wrapped to the day for kde)
    std::vector<double> predict(int t_plus_h) const;

    DemandMode mode() const { return mode_; }

private:
    DemandPredictor() = default;
    DemandMode mode_ = DemandMode::lambda_baseline;
    const Tensor3* lambda_ = nullptr;
    std::vector<std::vector<double>> densities_;  // zone -> per-slot density
};

// Coefficient persistence: zone_id,w0,w1,...
void write_coefficients_csv(const std::string& path,
                            const std::vector<std::vector<double>>& per_zone);
std::vector<std::vector<double>> read_coefficients_csv(const std::string& path);

// Event timestamps: zone_id,epoch_seconds -> per-zone day slot positions.
std::vector<std::vector<double>> read_events_csv(const std::string& path, int zones,
                                                 int slots_per_day);

}  // namespace relo::pred
