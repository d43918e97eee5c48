#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "cfboltz/random.hpp"

namespace cfboltz {

// Balanced walk of length n over steps {-1, 0, +1} with weight 2^{#zeros};
// the minus count m equals the plus count.
struct ToyBridge {
    std::uint64_t n = 0;
    std::vector<std::int8_t> steps;
    std::uint64_t m = 0;
};

// Counters accumulate across calls so one struct can aggregate a batch.
struct ToyStats {
    std::uint64_t restarts = 0;
    std::uint64_t reaches = 0;      // drifted walks that landed exactly
    std::uint64_t escalations = 0;  // exact-rational acceptance decisions
    double r_sum = 0;               // sum of acceptance rates over landings
};

// i.i.d. (1/4, 1/2, 1/4) draws, restarted until the sum vanishes.
ToyBridge toy_naive(std::uint64_t n, BitSource& bits,
                    ToyStats* stats = nullptr);

// Drifted 0/+1 walk (probabilities 2/3 and 1/3) to the slope -1 line
// through (n, 0), closed-form acceptance, then a balanced shuffle of the
// walk block against the -1 fill.
ToyBridge toy_accelerated(std::uint64_t n, BitSource& bits,
                          ToyStats* stats = nullptr);

// Argmax of 3^{n-m} C(n,m): floor(n/4).
std::uint64_t toy_mstar(std::uint64_t n);

// Exact acceptance rate 3^{m*-m} (n-m*)! m*! / ((n-m)! m!), always in [0,1].
mpq_class toy_rate(std::uint64_t n, std::uint64_t m);

// All balanced length-n walks, for exhaustive distribution checks.
std::vector<ToyBridge> toy_enumerate(std::uint64_t n);

// Direct sampling of the minus-step count; kept as an explicit stub.
ToyBridge toy_by_counts(std::uint64_t n, BitSource& bits);

}  // namespace cfboltz
