#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace cfboltz {

// Buffered stream of unbiased random bits with exact accounting.
// Backed by std::mt19937_64 (period 2^19937 - 1, standardised output),
// so identical seeds give identical bit streams on every platform.
class BitSource {
  public:
    explicit BitSource(std::uint64_t seed) : gen_(seed) {}

    bool bit() {
        if (avail_ == 0) {
            buf_ = gen_();
            avail_ = 64;
        }
        bool b = buf_ & 1u;
        buf_ >>= 1;
        --avail_;
        ++consumed_;
        return b;
    }

    // k <= 64 fresh bits packed MSB-first.
    std::uint64_t bits(unsigned k) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < k; ++i) v = (v << 1) | (bit() ? 1u : 0u);
        return v;
    }

    std::uint64_t bits_consumed() const { return consumed_; }

    // Sub-seed derivation for independent streams: SplitMix64 applied to
    // seed + (stream+1) * golden-ratio increment.
    static std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream);

  private:
    std::mt19937_64 gen_;
    std::uint64_t buf_ = 0;
    unsigned avail_ = 0;
    std::uint64_t consumed_ = 0;
};

// P(true) = p exactly, for rational p (clamped to [0,1]).  Consumes bits
// until the comparison U < p is decided; dyadic p needs at most
// log2(denominator) bits.
bool bernoulli(const mpq_class& p, BitSource& bits);

// P(true) = p where p is read as the exact dyadic rational the double
// stores, so the draw is exact with respect to the stored value.
bool bernoulli(double p, BitSource& bits);

// Uniform on {0, ..., n-1} by rejection on ceil(log2 n)-bit words.
std::uint64_t uniform_below(std::uint64_t n, BitSource& bits);

// Prepared finite distribution with exact integer cumulative weights;
// sampling lazily refines a dyadic interval until the bucket is decided.
class DiscreteDist {
  public:
    DiscreteDist() = default;
    explicit DiscreteDist(std::span<const mpq_class> weights);
    explicit DiscreteDist(std::span<const double> weights);

    std::size_t sample(BitSource& bits) const;
    std::size_t size() const { return cum_.size(); }
    // weight_i / total as double, for diagnostics.
    double prob(std::size_t i) const;

  private:
    void build(const std::vector<mpq_class>& w);
    std::vector<mpz_class> cum_;  // strictly increasing, cum_.back() = total
    // mirror of cum_ when the total fits 63 bits: lets sample() decide on a
    // 64-bit dyadic prefix with 128-bit compares instead of bignum refining
    std::vector<std::uint64_t> cum64_;
};

// One-off draw: index i with probability weights[i] / sum(weights).
std::size_t discrete(std::span<const mpq_class> weights, BitSource& bits);
std::size_t discrete(std::span<const double> weights, BitSource& bits);

}  // namespace cfboltz
