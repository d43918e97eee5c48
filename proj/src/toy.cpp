#include "cfboltz/toy.hpp"

#include <cmath>
#include <utility>

#include "cfboltz/certmath.hpp"
#include "cfboltz/errors.hpp"
#include "cfboltz/shuffle.hpp"

namespace cfboltz {

// c(m) = 3^{n-m} C(n,m) has c(m+1)/c(m) = (n-m)/(3(m+1)), so the maximum
// sits where (n-3)/4 <= m <= (n+1)/4; n/4 is always in that window.
std::uint64_t toy_mstar(std::uint64_t n) { return n / 4; }

mpq_class toy_rate(std::uint64_t n, std::uint64_t m) {
    const std::uint64_t ms = toy_mstar(n);
    mpq_class r(1);
    mpz_class p;
    if (ms >= m) {
        mpz_ui_pow_ui(p.get_mpz_t(), 3, ms - m);
        r *= p;
    } else {
        mpz_ui_pow_ui(p.get_mpz_t(), 3, m - ms);
        r /= p;
    }
    if (m >= ms) {
        // (n-m*)!/(n-m)! grows, m*!/m! shrinks
        for (std::uint64_t i = n - m + 1; i <= n - ms; ++i) r *= i;
        for (std::uint64_t i = ms + 1; i <= m; ++i) r /= i;
    } else {
        for (std::uint64_t i = n - ms + 1; i <= n - m; ++i) r /= i;
        for (std::uint64_t i = m + 1; i <= ms; ++i) r *= i;
    }
    return r;
}

namespace {

// Lazy comparison of a uniform U against the acceptance rate: interval
// logs decide almost always, the exact rational finishes the rest with
// the same dyadic prefix of U.
bool toy_accept(std::uint64_t n, std::uint64_t m, BitSource& bits,
                ToyStats* stats) {
    const std::uint64_t ms = toy_mstar(n);
    DInterval lr =
        DInterval::exact(double(std::int64_t(ms) - std::int64_t(m))) *
        i_log(DInterval::exact(3.0));
    lr = lr + lnfact_cert(n - ms) + lnfact_cert(ms) - lnfact_cert(n - m) -
         lnfact_cert(m);
    if (stats) stats->r_sum += std::exp(lr.mid());
    DInterval rr = i_exp(lr);
    std::uint64_t a = 0;
    int b = 0;
    while (b < 53) {
        a = (a << 1) | (bits.bit() ? 1u : 0u);
        ++b;
        if (std::ldexp(double(a + 1), -b) <= rr.lo) return true;
        if (std::ldexp(double(a), -b) >= rr.hi) return false;
    }
    if (stats) ++stats->escalations;
    const mpq_class r = toy_rate(n, m);
    mpz_class ai(a);
    mpz_class den(1);
    den <<= b;
    while (true) {
        // cross-multiplied: (ai+1)/den <= r accepts, ai/den >= r rejects
        mpz_class rhs = r.get_num() * den;
        if ((ai + 1) * r.get_den() <= rhs) return true;
        if (ai * r.get_den() >= rhs) return false;
        ai <<= 1;
        if (bits.bit()) ai |= 1;
        den <<= 1;
    }
}

}  // namespace

ToyBridge toy_naive(std::uint64_t n, BitSource& bits, ToyStats* stats) {
    while (true) {
        std::vector<std::int8_t> steps;
        steps.reserve(n);
        std::int64_t sum = 0;
        std::uint64_t minus = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (bits.bit()) {
                steps.push_back(0);
            } else if (bits.bit()) {
                steps.push_back(1);
                ++sum;
            } else {
                steps.push_back(-1);
                --sum;
                ++minus;
            }
        }
        if (sum == 0) return {n, std::move(steps), minus};
        if (stats) ++stats->restarts;
    }
}

ToyBridge toy_accelerated(std::uint64_t n, BitSource& bits, ToyStats* stats) {
    const mpq_class third(1, 3);
    while (true) {
        std::vector<std::int8_t> walk;
        std::uint64_t u = 0;
        while (u < n) {
            bool up = bernoulli(third, bits);
            walk.push_back(up ? std::int8_t(1) : std::int8_t(0));
            u += up ? 2 : 1;
        }
        if (u == n) {
            if (stats) ++stats->reaches;
            const std::uint64_t s = walk.size();
            const std::uint64_t m = n - s;
            if (toy_accept(n, m, bits, stats)) {
                BinaryShuffle sh = bbhl_shuffle(s, m, bits);
                std::vector<std::int8_t> steps(n);
                std::size_t wi = 0;
                for (std::size_t i = 0; i < n; ++i)
                    steps[i] = sh.seq[i] ? walk[wi++] : std::int8_t(-1);
                return {n, std::move(steps), m};
            }
        }
        if (stats) ++stats->restarts;
    }
}

std::vector<ToyBridge> toy_enumerate(std::uint64_t n) {
    std::vector<ToyBridge> out;
    std::vector<std::int8_t> cur;
    auto rec = [&](auto&& self, std::uint64_t depth, std::int64_t sum) -> void {
        if (depth == n) {
            if (sum == 0) {
                std::uint64_t minus = 0;
                for (std::int8_t s : cur) minus += s < 0 ? 1 : 0;
                out.push_back({n, cur, minus});
            }
            return;
        }
        for (std::int8_t s : {std::int8_t(-1), std::int8_t(0), std::int8_t(1)}) {
            cur.push_back(s);
            self(self, depth + 1, sum + s);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

ToyBridge toy_by_counts(std::uint64_t, BitSource&) {
    throw Error("direct sampling of the minus-step count is not implemented");
}

}  // namespace cfboltz
