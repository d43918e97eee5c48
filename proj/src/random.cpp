#include "cfboltz/random.hpp"

#include <bit>
#include <stdexcept>

#include "cfboltz/errors.hpp"

namespace cfboltz {

std::uint64_t BitSource::sub_seed(std::uint64_t seed, std::uint64_t stream) {
    // SplitMix64 finaliser.
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

bool bernoulli(const mpq_class& p, BitSource& bits) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    // Compare U = 0.b1 b2 ... against the binary expansion of p.
    mpz_class num = p.get_num();
    const mpz_class& den = p.get_den();
    for (;;) {
        num <<= 1;
        int digit = (num >= den) ? 1 : 0;
        if (digit) num -= den;
        int b = bits.bit() ? 1 : 0;
        if (b != digit) return b < digit;
        // Remaining digits of p are all zero: U >= p regardless of its tail.
        if (num == 0) return false;
    }
}

bool bernoulli(double p, BitSource& bits) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    return bernoulli(mpq_class(p), bits);
}

std::uint64_t uniform_below(std::uint64_t n, BitSource& bits) {
    if (n == 0) throw Error("uniform_below(0)");
    if (n == 1) return 0;
    unsigned k = static_cast<unsigned>(std::bit_width(n - 1));
    for (;;) {
        std::uint64_t v = bits.bits(k);
        if (v < n) return v;
    }
}

DiscreteDist::DiscreteDist(std::span<const mpq_class> weights) {
    std::vector<mpq_class> w(weights.begin(), weights.end());
    build(w);
}

DiscreteDist::DiscreteDist(std::span<const double> weights) {
    std::vector<mpq_class> w;
    w.reserve(weights.size());
    for (double x : weights) {
        if (x < 0) throw Error("negative weight");
        w.emplace_back(x);  // exact dyadic conversion
    }
    build(w);
}

void DiscreteDist::build(const std::vector<mpq_class>& w) {
    if (w.empty()) throw Error("empty weight vector");
    mpz_class lcm = 1;
    for (const auto& q : w) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
    cum_.resize(w.size());
    mpz_class acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0) throw Error("negative weight");
        mpz_class scaled = w[i].get_num() * (lcm / w[i].get_den());
        acc += scaled;
        cum_[i] = acc;
    }
    if (acc == 0) throw Error("all weights zero");
    cum64_.clear();
    if (mpz_sizeinbase(acc.get_mpz_t(), 2) <= 63) {
        cum64_.reserve(cum_.size());
        for (const auto& c : cum_)
            cum64_.push_back(mpz_get_ui(c.get_mpz_t()));
    }
}

std::size_t DiscreteDist::sample(BitSource& bits) const {
    const mpz_class& total = cum_.back();
    if (cum_.size() == 1) return 0;
    // Invariant: U * total lies in [a*total/2^b, (a+1)*total/2^b).
    mpz_class a = 0;
    mpz_class scale = 1;  // 2^b
    if (!cum64_.empty()) {
        // 64-bit prefix of U decides the bucket unless the dyadic interval
        // straddles a cumulative edge (probability ~ buckets / 2^64); the
        // chosen bucket is the same function of the bit stream either way
        const std::uint64_t t64 = cum64_.back();
        const std::uint64_t w = bits.bits(64);
        const unsigned __int128 lo128 =
            static_cast<unsigned __int128>(t64) * w;
        const unsigned __int128 hi128 = lo128 + t64;
        const std::uint64_t loq = static_cast<std::uint64_t>(lo128 >> 64);
        const std::uint64_t hic = static_cast<std::uint64_t>(hi128 >> 64) +
                                  (static_cast<std::uint64_t>(hi128) ? 1 : 0);
        std::size_t i = 0;
        while (i < cum64_.size() && cum64_[i] < hic) ++i;
        if (i < cum64_.size() && (i == 0 || cum64_[i - 1] <= loq)) return i;
        a = mpz_class(static_cast<unsigned long>(w));
        scale = mpz_class(1) << 64;
    }
    mpz_class lo = a * total;
    mpz_class hi = lo + total;
    for (;;) {
        // Find the first bucket whose cumulative weight can contain the
        // interval; the interval is inside bucket i iff
        // cum_[i-1] * 2^b <= lo and hi <= cum_[i] * 2^b.
        std::size_t i = 0;
        while (i < cum_.size() && cum_[i] * scale < hi) ++i;
        if (i < cum_.size()) {
            mpz_class left = (i == 0) ? mpz_class(0) : cum_[i - 1] * scale;
            if (left <= lo) return i;
        }
        a <<= 1;
        if (bits.bit()) a += 1;
        scale <<= 1;
        lo = a * total;
        hi = lo + total;
    }
}

double DiscreteDist::prob(std::size_t i) const {
    mpq_class w(i == 0 ? cum_[0] : cum_[i] - cum_[i - 1], cum_.back());
    w.canonicalize();
    return w.get_d();
}

std::size_t discrete(std::span<const mpq_class> weights, BitSource& bits) {
    return DiscreteDist(weights).sample(bits);
}

std::size_t discrete(std::span<const double> weights, BitSource& bits) {
    return DiscreteDist(weights).sample(bits);
}

}  // namespace cfboltz
