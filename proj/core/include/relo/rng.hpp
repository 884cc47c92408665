#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace relo {

// Deterministic seed derivation. Streams are addressed by hashing the
// parent seed with stream coordinates, so consumers never share state:
//   scenario seed   = derive(base_seed, scenario_index)
//   per-zone stream = derive(scenario_seed, t, i)
uint64_t mix64(uint64_t x);
uint64_t derive(uint64_t seed, uint64_t a);
uint64_t derive(uint64_t seed, uint64_t a, uint64_t b);
uint64_t derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c);

// splitmix64 stream. Small, fast, and fully defined by its seed, which is
// what the reproducibility contract needs.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n);

    double next_gaussian();

private:
    uint64_t state_;
};

// Poisson sampler: inversion below lambda = 10, transformed rejection
// (normal-shaped hat) above.
long poisson(Rng& rng, double lambda);

// Inversion fast path when exp(-lambda) is precomputed (lambda < 10).
long poisson_inv(Rng& rng, double lambda, double exp_neg_lambda);

// One categorical draw over nonnegative weights visited in the order given
// by `visit` (identity when empty). Returns the chosen index.
int categorical(Rng& rng, std::span<const double> weights, double total,
                std::span<const int> visit = {});

// n categorical draws aggregated into counts.
std::vector<long> multinomial(Rng& rng, long n, std::span<const double> weights,
                              std::span<const int> visit = {});

}  // namespace relo
