#include "relo/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "relo/csv.hpp"

namespace relo::pred {

namespace {

struct CenteredDesign {
    int rows = 0;
    int window = 0;
    std::vector<double> gram;      // window x window, of centered X
    std::vector<double> xty;       // centered X^T y
    std::vector<double> col_mean;  // feature means
    double y_mean = 0.0;
};

// feature k of the example targeting index q is history[q - horizon - k]
CenteredDesign build_design(std::span<const double> h, int window, int horizon) {
    const int L = static_cast<int>(h.size());
    const int first_q = window + horizon - 1;
    const int rows = L - first_q;
    if (rows < 1) throw std::invalid_argument("fit_linear: history too short for window+horizon");

    CenteredDesign d;
    d.rows = rows;
    d.window = window;
    d.col_mean.assign(window, 0.0);
    for (int r = 0; r < rows; ++r) {
        const int q = first_q + r;
        d.y_mean += h[q];
        for (int k = 0; k < window; ++k) d.col_mean[k] += h[q - horizon - k];
    }
    d.y_mean /= rows;
    for (double& m : d.col_mean) m /= rows;

    d.gram.assign(static_cast<size_t>(window) * window, 0.0);
    d.xty.assign(window, 0.0);
    std::vector<double> f(window);
    for (int r = 0; r < rows; ++r) {
        const int q = first_q + r;
        for (int k = 0; k < window; ++k) f[k] = h[q - horizon - k] - d.col_mean[k];
        const double yc = h[q] - d.y_mean;
        for (int a = 0; a < window; ++a) {
            d.xty[a] += f[a] * yc;
            const double fa = f[a];
            double* row = &d.gram[static_cast<size_t>(a) * window];
            for (int b = a; b < window; ++b) row[b] += fa * f[b];
        }
    }
    // mirror upper triangle
    for (int a = 0; a < window; ++a)
        for (int b = 0; b < a; ++b)
            d.gram[static_cast<size_t>(a) * window + b] = d.gram[static_cast<size_t>(b) * window + a];
    return d;
}

// in-place Cholesky solve of (G + ridge I) w = b; returns false when not PD
bool cholesky_solve(std::vector<double> g, int n, double ridge, std::vector<double> b,
                    std::vector<double>& out) {
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i) * n + i] += ridge;
    for (int c = 0; c < n; ++c) {
        double diag = g[static_cast<size_t>(c) * n + c];
        for (int k = 0; k < c; ++k) {
            const double l = g[static_cast<size_t>(c) * n + k];
            diag -= l * l;
        }
        if (diag <= 1e-12) return false;
        diag = std::sqrt(diag);
        g[static_cast<size_t>(c) * n + c] = diag;
        for (int r = c + 1; r < n; ++r) {
            double v = g[static_cast<size_t>(r) * n + c];
            for (int k = 0; k < c; ++k)
                v -= g[static_cast<size_t>(r) * n + k] * g[static_cast<size_t>(c) * n + k];
            g[static_cast<size_t>(r) * n + c] = v / diag;
        }
    }
    // forward then back substitution
    for (int i = 0; i < n; ++i) {
        double v = b[i];
        for (int k = 0; k < i; ++k) v -= g[static_cast<size_t>(i) * n + k] * b[k];
        b[i] = v / g[static_cast<size_t>(i) * n + i];
    }
    out.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double v = b[i];
        for (int k = i + 1; k < n; ++k) v -= g[static_cast<size_t>(k) * n + i] * out[k];
        out[i] = v / g[static_cast<size_t>(i) * n + i];
    }
    return true;
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

}  // namespace

std::vector<double> fit_linear(std::span<const double> history, int window, int horizon,
                               Penalty penalty, double strength) {
    if (window < 1 || horizon < 1) throw std::invalid_argument("fit_linear: window and horizon must be >= 1");
    if (strength < 0.0) throw std::invalid_argument("fit_linear: negative strength");
    const CenteredDesign d = build_design(history, window, horizon);

    bool all_zero = true;
    for (int k = 0; k < window && all_zero; ++k)
        if (d.gram[static_cast<size_t>(k) * window + k] > 0.0) all_zero = false;

    std::vector<double> w(window, 0.0);
    if (!all_zero) {
        if (penalty == Penalty::l2) {
            if (!cholesky_solve(d.gram, window, strength, d.xty, w)) {
                if (strength == 0.0)
                    throw std::runtime_error("fit_linear: singular design; use strength > 0");
                throw std::runtime_error("fit_linear: normal equations not positive definite");
            }
        } else {
            // cyclic coordinate descent on the centered problem
            const double tol = 1e-6;
            const int max_sweeps = 10000;
            for (int sweep = 0; sweep < max_sweeps; ++sweep) {
                double max_delta = 0.0;
                for (int k = 0; k < window; ++k) {
                    const double gkk = d.gram[static_cast<size_t>(k) * window + k];
                    if (gkk <= 0.0) {
                        w[k] = 0.0;
                        continue;
                    }
                    double rk = d.xty[k];
                    const double* grow = &d.gram[static_cast<size_t>(k) * window];
                    for (int j = 0; j < window; ++j)
                        if (j != k) rk -= grow[j] * w[j];
                    const double nw = soft_threshold(rk, strength) / gkk;
                    max_delta = std::max(max_delta, std::abs(nw - w[k]));
                    w[k] = nw;
                }
                if (max_delta < tol) break;
            }
            if (strength == 0.0) {
                // mirror the l2 contract for unpenalized singular designs
                for (int k = 0; k < window; ++k)
                    if (d.gram[static_cast<size_t>(k) * window + k] <= 0.0)
                        throw std::runtime_error("fit_linear: singular design; use strength > 0");
            }
        }
    }

    std::vector<double> coef(window + 1);
    double intercept = d.y_mean;
    for (int k = 0; k < window; ++k) intercept -= w[k] * d.col_mean[k];
    coef[0] = intercept;
    std::copy(w.begin(), w.end(), coef.begin() + 1);
    return coef;
}

double predict_linear(std::span<const double> recent, std::span<const double> coef) {
    const int window = static_cast<int>(coef.size()) - 1;
    if (static_cast<int>(recent.size()) < window)
        throw std::invalid_argument("predict_linear: insufficient history");
    double y = coef[0];
    const size_t n = recent.size();
    for (int k = 0; k < window; ++k) y += coef[1 + k] * recent[n - 1 - k];
    return y;
}

SeriesBuffer::SeriesBuffer(int zones, int capacity) : capacity_(capacity), data_(zones) {}

void SeriesBuffer::seed(int zone, std::span<const double> history) {
    auto& d = data_[zone];
    d.assign(history.begin(), history.end());
    if (static_cast<int>(d.size()) > capacity_)
        d.erase(d.begin(), d.end() - capacity_);
}

void SeriesBuffer::push(int zone, double value) {
    auto& d = data_[zone];
    d.push_back(value);
    if (static_cast<int>(d.size()) > 2 * capacity_)
        d.erase(d.begin(), d.end() - capacity_);
}

int SeriesBuffer::length(int zone) const { return static_cast<int>(data_[zone].size()); }

std::vector<double> SeriesBuffer::tail(int zone, int count) const {
    const auto& d = data_[zone];
    if (static_cast<int>(d.size()) < count)
        throw std::runtime_error("series buffer: zone " + std::to_string(zone) +
                                 " has insufficient history");
    return {d.end() - count, d.end()};
}

AvailabilityPredictor::AvailabilityPredictor(PredictorConfig cfg, int zones, int buffer_capacity)
    : cfg_(cfg), zones_(zones), buffer_(zones, std::max(buffer_capacity, cfg.window + 1)), coef_(zones) {}

void AvailabilityPredictor::seed_history(int zone, std::span<const double> history) {
    buffer_.seed(zone, history);
}

void AvailabilityPredictor::fit(const Matrix& zone_history) {
    if (cfg_.kind != AvailabilityKind::linear_l1 && cfg_.kind != AvailabilityKind::linear_l2) return;
    const Penalty p = cfg_.kind == AvailabilityKind::linear_l1 ? Penalty::l1 : Penalty::l2;
    for (int z = 0; z < zones_; ++z) {
        std::span<const double> row(&zone_history.v[static_cast<size_t>(z) * zone_history.cols],
                                    zone_history.cols);
        coef_[z] = fit_linear(row, cfg_.window, cfg_.horizon, p, cfg_.strength);
    }
}

void AvailabilityPredictor::set_coefficients(int zone, std::vector<double> coef) {
    coef_[zone] = std::move(coef);
}

const std::vector<double>& AvailabilityPredictor::coefficients(int zone) const {
    return coef_[zone];
}

void AvailabilityPredictor::observe(std::span<const double> x_v) {
    for (int z = 0; z < zones_; ++z) buffer_.push(z, x_v[z]);
}

std::vector<double> AvailabilityPredictor::predict() const {
    std::vector<double> out(zones_, 0.0);
    for (int z = 0; z < zones_; ++z) {
        double y = 0.0;
        switch (cfg_.kind) {
            case AvailabilityKind::last:
                y = buffer_.tail(z, 1)[0];
                break;
            case AvailabilityKind::moving_average: {
                const auto t = buffer_.tail(z, cfg_.window);
                double s = 0.0;
                for (double v : t) s += v;
                y = s / t.size();
                break;
            }
            case AvailabilityKind::linear_l1:
            case AvailabilityKind::linear_l2: {
                if (coef_[z].empty())
                    throw std::runtime_error("availability predictor: zone " + std::to_string(z) +
                                             " has no fitted coefficients");
                y = predict_linear(buffer_.tail(z, cfg_.window), coef_[z]);
                break;
            }
        }
        out[z] = std::max(0.0, y);
    }
    return out;
}

std::vector<double> kde_day_density(std::span<const double> event_slots, int slots_per_day,
                                    double bandwidth) {
    if (event_slots.empty()) throw std::invalid_argument("kde: no events");
    if (bandwidth <= 0.0) throw std::invalid_argument("kde: bandwidth must be positive");
    std::vector<double> density(slots_per_day, 0.0);
    const double inv2b2 = 1.0 / (2.0 * bandwidth * bandwidth);
    for (int s = 0; s < slots_per_day; ++s) {
        double g = 0.0;
        for (double e : event_slots) {
            const double d = s - e;
            g += std::exp(-d * d * inv2b2);
        }
        density[s] = g;
    }
    double total = 0.0;
    for (double g : density) total += g;
    for (double& g : density) g /= total;  // unit mass over the day
    return density;
}

DemandPredictor DemandPredictor::lambda_baseline(const Tensor3* lambda) {
    DemandPredictor p;
    p.mode_ = DemandMode::lambda_baseline;
    p.lambda_ = lambda;
    return p;
}

DemandPredictor DemandPredictor::kde(const std::vector<std::vector<double>>& events_per_zone,
                                     int slots_per_day, double bandwidth) {
    DemandPredictor p;
    p.mode_ = DemandMode::kde;
    p.densities_.reserve(events_per_zone.size());
    for (const auto& ev : events_per_zone)
        p.densities_.push_back(kde_day_density(ev, slots_per_day, bandwidth));
    return p;
}

std::vector<double> DemandPredictor::predict(int t_plus_h) const {
    if (mode_ == DemandMode::lambda_baseline) {
        const Tensor3& L = *lambda_;
        const int slot = std::min(t_plus_h, L.n3);  // saturate past the horizon
        std::vector<double> out(L.n1, 0.0);
        for (int i = 0; i < L.n1; ++i) {
            double s = 0.0;
            for (int j = 0; j < L.n2; ++j) s += L.at(i, j, slot - 1);
            out[i] = s;
        }
        return out;
    }
    std::vector<double> out(densities_.size(), 0.0);
    for (size_t z = 0; z < densities_.size(); ++z) {
        const int p = static_cast<int>(densities_[z].size());
        out[z] = densities_[z][((t_plus_h - 1) % p + p) % p];
    }
    return out;
}

void write_coefficients_csv(const std::string& path,
                            const std::vector<std::vector<double>>& per_zone) {
    csv::Writer w(path);
    for (size_t z = 0; z < per_zone.size(); ++z) {
        std::vector<std::string> row{std::to_string(z)};
        for (double c : per_zone[z]) row.push_back(csv::fmt(c));
        w.row(row);
    }
}

std::vector<std::vector<double>> read_coefficients_csv(const std::string& path) {
    std::vector<std::vector<double>> out;
    for (const auto& r : csv::read_rows(path)) {
        const size_t z = std::stoul(r[0]);
        if (out.size() <= z) out.resize(z + 1);
        for (size_t k = 1; k < r.size(); ++k) out[z].push_back(std::stod(r[k]));
    }
    return out;
}

std::vector<std::vector<double>> read_events_csv(const std::string& path, int zones,
                                                 int slots_per_day) {
    std::vector<std::vector<double>> out(zones);
    const double seconds_per_slot = 86400.0 / slots_per_day;
    for (const auto& r : csv::read_rows(path)) {
        const int z = std::stoi(r[0]);
        if (z < 0 || z >= zones) throw std::runtime_error("events csv: zone out of range");
        const double epoch = std::stod(r[1]);
        const double day_sec = std::fmod(epoch, 86400.0);
        out[z].push_back(day_sec / seconds_per_slot);
    }
    return out;
}

}  // namespace relo::pred
