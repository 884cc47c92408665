#include "relo/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace relo {

uint64_t mix64(uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t derive(uint64_t seed, uint64_t a) { return mix64(seed ^ mix64(a + 0x51ed2701ull)); }

uint64_t derive(uint64_t seed, uint64_t a, uint64_t b) { return derive(derive(seed, a), b); }

uint64_t derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return derive(derive(seed, a, b), c);
}

uint64_t Rng::next_below(uint64_t n) {
    if (n == 0) return 0;
    // rejection to avoid modulo bias
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double Rng::next_gaussian() {
    // Box-Muller, one value per call (the sibling is discarded to keep the
    // stream layout simple)
    double u1;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

long poisson_inv(Rng& rng, double lambda, double exp_neg_lambda) {
    const double u = rng.next_double();
    long k = 0;
    double p = exp_neg_lambda;
    double cum = p;
    while (u > cum) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
        if (k > 200) break;  // numerically exhausted tail
    }
    return k;
}

namespace {

// Hormann's transformed rejection (PTRS), valid for lambda >= 10. The hat
// is a shifted/scaled uniform-to-normal-like transform.
long poisson_ptrs(Rng& rng, double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            k * loglam - lambda - std::lgamma(k + 1.0)) {
            return static_cast<long>(k);
        }
    }
}

}  // namespace

long poisson(Rng& rng, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("poisson: negative intensity");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) return poisson_inv(rng, lambda, std::exp(-lambda));
    return poisson_ptrs(rng, lambda);
}

int categorical(Rng& rng, std::span<const double> weights, double total,
                std::span<const int> visit) {
    const double u = rng.next_double() * total;
    double cum = 0.0;
    if (visit.empty()) {
        for (size_t i = 0; i < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }
    int last = -1;
    for (int idx : visit) {
        if (weights[idx] <= 0.0) continue;
        last = idx;
        cum += weights[idx];
        if (u < cum) return idx;
    }
    return last;
}

std::vector<long> multinomial(Rng& rng, long n, std::span<const double> weights,
                              std::span<const int> visit) {
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<long> counts(weights.size(), 0);
    if (total <= 0.0) throw std::invalid_argument("multinomial: nonpositive weight total");
    for (long i = 0; i < n; ++i) counts[categorical(rng, weights, total, visit)] += 1;
    return counts;
}

}  // namespace relo
