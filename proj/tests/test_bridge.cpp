#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfboltz/bridge.hpp"
#include "cfboltz/errors.hpp"
#include "cfboltz/oracle.hpp"
#include "cfboltz/stats.hpp"
#include "cfboltz/tree.hpp"
#include "helpers.hpp"

using namespace cfboltz;

namespace {

std::vector<std::int64_t> near_equal_split(std::uint64_t total, std::uint64_t k) {
    std::vector<std::int64_t> ut(k, std::int64_t(total / k));
    for (std::uint64_t i = 0; i < total % k; ++i) ++ut[i];
    return ut;
}

// walk statistics of one accepted piece list
void classify(const std::vector<Subtree>& pieces, std::uint64_t v0,
              std::vector<std::int64_t>& ut, std::uint64_t& k,
              std::uint64_t& m) {
    ut.clear();
    k = m = 0;
    for (const auto& p : pieces) {
        std::int64_t u = std::int64_t(p.v) + std::int64_t(v0) * (std::int64_t(p.ell) - 1);
        if (u == 0) {
            ++m;
        } else {
            ut.push_back(u);
            ++k;
        }
    }
}

}  // namespace

TEST_CASE("the saddle count solves its digamma equation") {
    CHECK(solve_mstar(1, 0.5) == 0.0);
    CHECK(solve_mstar(1, 0.9) == 0.0);
    CHECK(solve_mstar(10, 1e-8) == 0.0);
    for (std::uint64_t k : {10ull, 100ull, 1000ull, 1000000ull})
        for (double a0 : {0.3, 0.5, 0.7}) {
            double m = solve_mstar(k, a0);
            REQUIRE(m >= 0);
            if (m > 0)
                CHECK(std::fabs(digamma(m + double(k)) - digamma(m + 1) +
                                std::log(a0)) <= 1e-8);
        }
    CHECK(std::fabs(solve_mstar(100, 0.5) - 99) <= 1.0);
    CHECK(solve_mstar(1000000, 0.5) / 1e6 == doctest::Approx(1.0).epsilon(1e-3));
    // monotone in the walk length
    double prev = 0;
    for (std::uint64_t k = 2; k <= 4096; k *= 2) {
        double m = solve_mstar(k, 0.5);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("acceptance plans satisfy their structural identities") {
    struct Cfg {
        CombinatorialSpec spec;
        std::uint64_t n;
        bool binary;
    };
    const Cfg cfgs[] = {{testutil::binary_spec(), 1001, true},
                        {testutil::binary_spec(), 10001, true},
                        {testutil::rhv_spec(), 300, false},
                        {testutil::rhv_spec(), 1000, false}};
    for (const auto& cfg : cfgs) {
        auto ctx = build_bridge_context(cfg.spec, cfg.n);
        const auto& plan = ctx.plan;
        CHECK(plan.n == cfg.n);
        CHECK(plan.n_prime == cfg.n - 1);
        CHECK(plan.x == ctx.mix.x);
        CHECK(plan.cosh_norm == ctx.mix.cosh_norm);
        CHECK(plan.a0 == ctx.consts.a0);
        CHECK(plan.aneq == ctx.consts.aneq);

        CHECK(plan.scan_margin > 0);
        CHECK(plan.log_kn ==
              doctest::Approx(-plan.scan_max - plan.ln_c.hi - plan.scan_margin)
                  .epsilon(1e-12));
        CHECK(plan.kn == doctest::Approx(std::exp(plan.log_kn)).epsilon(1e-12));
        CHECK(plan.scan_sign_changes <= 1);
        CHECK(plan.k_dagger >= 1);
        CHECK(plan.k_dagger <= plan.n_prime);
        CHECK(plan.m_star >= 0);

        double lncosh = std::log(plan.cosh_norm);
        CHECK(plan.ln_cosh_norm.lo <= lncosh);
        CHECK(plan.ln_cosh_norm.hi >= lncosh);
        CHECK(plan.ln_c.lo <= double(plan.n_prime) * lncosh);
        CHECK(plan.ln_c.hi >= double(plan.n_prime) * lncosh);
        CHECK(plan.ln_a0.lo <= std::log(plan.a0));
        CHECK(plan.ln_a0.hi >= std::log(plan.a0));
        CHECK(plan.ln_aneq.lo <= std::log(plan.aneq));
        CHECK(plan.ln_aneq.hi >= std::log(plan.aneq));

        double ratio = double(plan.k_dagger) / double(plan.n_prime);
        if (cfg.binary) {
            CHECK(plan.k_dagger >= std::uint64_t(0.99 * double(plan.n_prime)));
            // scanned family constant approaches sqrt(4 pi e^3)
            double c = std::exp(-plan.scan_max) /
                       std::pow(double(plan.n_prime), 1.5);
            CHECK(c == doctest::Approx(15.8874).epsilon(0.2));
        } else {
            double gate = cfg.n >= 1000 ? 0.05 : 0.12;
            CHECK(std::fabs(ratio - ctx.consts.kappa_star) <= gate);
        }
    }
    // the argmax location tracks kappa* n' as n grows
    auto big = build_bridge_context(testutil::rhv_spec(), 10000);
    double ratio = double(big.plan.k_dagger) / double(big.plan.n_prime);
    CHECK(std::fabs(ratio - big.consts.kappa_star) <= 0.05);
}

TEST_CASE("certified acceptance ratios never clear zero") {
    auto ctx = build_bridge_context(testutil::binary_spec(), 1001);
    const auto& plan = ctx.plan;
    const std::uint64_t np = plan.n_prime;

    // single giant step
    auto [r1, e1] = log_acceptance(plan, {std::int64_t(np)}, 1, 0);
    CHECK(r1 + e1 <= 0);
    // all-ones walk
    auto ones = near_equal_split(np, np);
    auto [r2, e2] = log_acceptance(plan, ones, np, 0);
    CHECK(r2 + e2 <= 0);
    // near the scan argmax the bound is close to tight
    double best = -1e300;
    for (double mc : {std::floor(plan.m_star), std::ceil(plan.m_star)}) {
        auto ut = near_equal_split(np, plan.k_dagger);
        auto [r, e] =
            log_acceptance(plan, ut, plan.k_dagger, std::uint64_t(mc));
        CHECK(r + e <= 0);
        best = std::max(best, r);
    }
    CHECK(best >= -2.0);
    // deterministic evaluation
    auto a = log_acceptance(plan, ones, np, 3);
    auto b = log_acceptance(plan, ones, np, 3);
    CHECK(a == b);
}

TEST_CASE("accepted configurations re-certify below zero") {
    auto ctx = build_bridge_context(testutil::binary_spec(), 1000);
    BitSource bits(81);
    std::vector<std::int64_t> ut;
    std::uint64_t k = 0, m = 0;
    for (int i = 0; i < 50; ++i) {
        auto pieces = sample_bridge(ctx, 1000, bits);
        classify(pieces, ctx.catalog.v0, ut, k, m);
        std::int64_t su = 0;
        for (auto u : ut) su += u;
        CHECK(su == std::int64_t(ctx.plan.n_prime));
        auto [r, e] = log_acceptance(ctx.plan, ut, k, m);
        CHECK(r + e <= 0);
    }
}

TEST_CASE("piece lists close the excursion endpoint") {
    auto ctx = build_bridge_context(testutil::binary_spec(), 6);
    BitSource bits(82);
    for (int i = 0; i < 200; ++i) {
        auto pieces = sample_bridge(ctx, 6, bits);
        std::uint64_t v = 0;
        std::int64_t dl = 0;
        for (const auto& p : pieces) {
            v += p.v;
            dl += std::int64_t(p.ell) - 1;
        }
        CHECK(v == 6);
        CHECK(dl == -1);
    }
}

TEST_CASE("binary size-4 excursions match the exact law") {
    auto spec = testutil::binary_spec();
    ExactOracle oracle(spec);
    auto classes = oracle.enumerate(4, 100);
    REQUIRE(classes.size() == 5);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i)
        index[to_paren(spec, classes[i])] = i;

    auto ctx = build_bridge_context(spec, 4);
    BitSource bits(83);
    std::vector<std::uint64_t> observed(5, 0);
    const int draws = 5000;
    for (int i = 0; i < draws; ++i) {
        auto t = sample_excursion(ctx, 4, bits);
        CHECK(t.v == 4);
        auto it = index.find(to_paren(spec, t));
        REQUIRE(it != index.end());
        ++observed[it->second];
    }
    std::vector<double> probs(5, 1.0 / 5);  // unit weights: uniform
    CHECK(chi_square_test(observed, probs).p_value > 1e-3);
}

TEST_CASE("rhv excursions assemble to well-formed trees") {
    auto ctx = build_bridge_context(testutil::rhv_spec(), 300);
    BitSource bits(84);
    for (int i = 0; i < 2; ++i) {
        auto t = sample_excursion(ctx, 300, bits);
        CHECK(t.v == 300);
        std::uint64_t v = 0, ell = 0;
        recount(ctx.spec, t.nodes, false, &v, &ell);
        CHECK(v == 300);
        CHECK(ell == 0);
    }
}

TEST_CASE("rhv walk statistics land near their predicted values") {
    auto ctx = build_bridge_context(testutil::rhv_spec(), 1000);
    BitSource bits(123);
    BridgeStats stats;
    double ksum = 0;
    const int draws = 6;
    for (int i = 0; i < draws; ++i) {
        auto pieces = sample_bridge(ctx, 1000, bits, &stats);
        std::vector<std::int64_t> ut;
        std::uint64_t k = 0, m = 0;
        classify(pieces, ctx.catalog.v0, ut, k, m);
        CHECK(k == stats.k);
        CHECK(m == stats.m);
        ksum += double(k);
    }
    double mean_k = ksum / draws;
    double target = ctx.consts.kappa_star * double(ctx.plan.n_prime);
    CHECK(mean_k >= target * 0.95);
    CHECK(mean_k <= target * 1.05);

    double walks = double(stats.restarts) + draws;
    double reach = double(stats.reaches) / walks;
    CHECK(std::fabs(reach - ctx.consts.reach_prob) <= 0.05);
}

TEST_CASE("binary walks always reach the landing diagonal") {
    auto ctx = build_bridge_context(testutil::binary_spec(), 1000);
    BitSource bits(85);
    BridgeStats stats;
    const int draws = 20;
    for (int i = 0; i < draws; ++i) sample_bridge(ctx, 1000, bits, &stats);
    CHECK(stats.reaches == stats.restarts + draws);
}

TEST_CASE("sizes outside the sampler's range raise typed errors") {
    CHECK_THROWS_AS(build_bridge_context(testutil::binary_spec(), 0),
                    EmptySizeClass);
    CHECK_THROWS_AS(build_bridge_context(testutil::rhv_spec(), 20),
                    SizeTooSmall);
}

TEST_CASE("the minimal size degenerates to a single base piece") {
    for (const auto& spec : {testutil::binary_spec(), testutil::rhv_spec(),
                             testutil::weighted_spec()}) {
        auto ctx = build_bridge_context(spec, 1);
        CHECK(ctx.degenerate);
        BitSource bits(86);
        auto pieces = sample_bridge(ctx, 1, bits);
        REQUIRE(pieces.size() == 1);
        CHECK(pieces[0].v == 1);
        CHECK(pieces[0].ell == 0);
        auto t = sample_excursion(ctx, 1, bits);
        CHECK(t.v == 1);
    }
}

TEST_CASE("an exhausted restart budget raises the typed error") {
    auto ctx = build_bridge_context(testutil::rhv_spec(), 300);
    ctx.restart_budget = 0;
    BitSource bits(999);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 50; ++i) sample_bridge(ctx, 300, bits);
        }(),
        RestartBudgetExceeded);
}

TEST_CASE("large binary sizes sample in one pass") {
    auto ctx = build_bridge_context(testutil::binary_spec(), 30000);
    BitSource bits(87);
    auto t = sample_excursion(ctx, 30000, bits);
    CHECK(t.v == 30000);
}
