// End-to-end acceptance harness: eight gated workloads, one PASS/FAIL line
// each, nonzero exit if any gate fails. Statistical gates run under pinned
// seeds so reruns are deterministic; wall-clock gates report their measured
// factors.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

#include "cfboltz/bridge.hpp"
#include "cfboltz/catalog.hpp"
#include "cfboltz/certmath.hpp"
#include "cfboltz/critical.hpp"
#include "cfboltz/errors.hpp"
#include "cfboltz/mixture.hpp"
#include "cfboltz/oracle.hpp"
#include "cfboltz/parser.hpp"
#include "cfboltz/random.hpp"
#include "cfboltz/shuffle.hpp"
#include "cfboltz/stats.hpp"
#include "cfboltz/toy.hpp"
#include "cfboltz/tree.hpp"
#include "helpers.hpp"

using namespace cfboltz;

namespace {

std::uint64_t g_breaches = 0;

struct Line {
    bool pass = false;
    std::string text;
};

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void progress(const char* what) {
    std::fprintf(stderr, "# running %s\n", what);
    std::fflush(stderr);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <typename F>
Line guarded_criterion(const char* name, F&& f) {
    progress(name);
    try {
        return f();
    } catch (const InvariantBreach& e) {
        ++g_breaches;
        return {false, fmt("FAIL invariant breach: %s", e.what())};
    } catch (const std::exception& e) {
        return {false, fmt("FAIL exception: %s", e.what())};
    }
}

// ---------------------------------------------------------------- C1 ----

Line crit1() {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = testutil::rhv_spec();
    auto crit = solve_characteristic(spec);
    auto cat = compute_catalog(spec);
    auto d = derived_constants(spec, crit, cat);
    double elapsed = seconds_since(t0);

    struct Pin {
        const char* name;
        double got, want, tol;
    };
    const Pin pins[] = {
        {"z", crit.zeta, 0.1868943725, 1e-8},
        {"R", crit.tau[0], 0.3945155166, 1e-8},
        {"H", crit.tau[1], 0.3028172374, 1e-8},
        {"V", crit.tau[2], 0.3028172374, 1e-8},
        {"a0", d.a0, 0.473731360822, 1e-8},
        {"aneq", d.aneq, 0.526268639178, 1e-8},
        {"vbar", d.vbar, 1.92876749182, 1e-8},
        {"eps", d.eps, 0.904741338123, 1e-8},
        {"kappa", d.kappa_star, 0.272852296303, 1e-8},
        {"mu", d.mu_star, 0.245613513724, 1e-8},
        {"reach", d.reach_prob, 0.272852295986, 1e-6},
    };
    bool ok = elapsed < 1.0;
    std::string bad;
    for (const auto& p : pins)
        if (std::fabs(p.got - p.want) > p.tol) {
            ok = false;
            bad += fmt(" %s=%.12g", p.name, p.got);
        }
    if (!bad.empty()) return {false, fmt("FAIL off-pin values:%s", bad.c_str())};
    return {ok, fmt("%s rhv singularity and derived scalars on pins (%.2fs)",
                    ok ? "PASS" : "FAIL", elapsed)};
}

// ---------------------------------------------------------------- C2 ----

Line crit2() {
    std::string detail;
    bool ok = true;
    struct M {
        const char* name;
        CombinatorialSpec spec;
    };
    const M models[] = {{"binary", testutil::binary_spec()},
                        {"rhv", testutil::rhv_spec()}};
    for (const auto& m : models) {
        auto crit = solve_characteristic(m.spec);
        auto red = solve_reduced_system(m.spec, crit.zeta, crit.theta);
        double fix = std::fabs(red.a / crit.theta - 1.0);
        double lam = frobenius_eigenvalue(crit.kmat).first;
        bool good = fix <= 1e-9 && std::fabs(lam - 1.0) <= 1e-8;
        ok = ok && good;
        detail += fmt(" %s:|a/theta-1|=%.2g,lambda-1=%.2g", m.name, fix,
                      lam - 1.0);
    }
    return {ok, fmt("%s fixed point and unit spectral radius%s",
                    ok ? "PASS" : "FAIL", detail.c_str())};
}

// ---------------------------------------------------------------- C3 ----

Line crit3() {
    const double target_tries = std::sqrt(8.0 / 3);
    const double target_er = std::sqrt(2.0 / 3);

    BitSource bits(3001);
    ToyStats st;
    const std::uint64_t accepted = 10000;
    for (std::uint64_t i = 0; i < accepted; ++i) toy_accelerated(4096, bits, &st);
    double tries = double(st.restarts + accepted) / double(accepted);
    double er = st.r_sum / double(st.reaches);

    BitSource b2(3002);
    ToyStats s2;
    std::uint64_t acc2 = 0;
    while (s2.restarts + acc2 < 50000) {
        toy_accelerated(10000, b2, &s2);
        ++acc2;
    }
    double reach = double(s2.reaches) / double(s2.restarts + acc2);

    bool ok = tries >= 0.95 * target_tries && tries <= 1.05 * target_tries &&
              er >= 0.97 * target_er && er <= 1.03 * target_er &&
              std::fabs(reach - 0.75) <= 0.01;
    return {ok,
            fmt("%s toy limits: tries=%.4f (%.4f+-5%%), E[r]=%.4f "
                "(%.4f+-3%%), reach@1e4=%.4f (0.75+-0.01)",
                ok ? "PASS" : "FAIL", tries, target_tries, er, target_er,
                reach)};
}

// ---------------------------------------------------------------- C4 ----

double chi_p_for(const CombinatorialSpec& spec, std::uint64_t n,
                 bool tilted, std::uint64_t seed, std::uint64_t* classes_out) {
    ExactOracle oracle(spec);
    auto classes = oracle.enumerate(n, 1000);
    std::map<std::string, std::size_t> index;
    mpq_class total = 0;
    std::vector<mpq_class> w(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        w[i] = tree_weight(spec, classes[i]);
        total += w[i];
        index[to_paren(spec, classes[i])] = i;
    }
    std::vector<double> probs(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i)
        probs[i] = mpq_class(w[i] / total).get_d();

    const std::uint64_t draws = 1000 * classes.size();
    std::vector<std::uint64_t> observed(classes.size(), 0);
    BitSource bits(seed);
    if (tilted) {
        auto ctx = build_bridge_context(spec, n);
        for (std::uint64_t i = 0; i < draws; ++i)
            ++observed[index.at(to_paren(spec, sample_excursion(ctx, n, bits)))];
    } else {
        for (std::uint64_t i = 0; i < draws; ++i)
            ++observed[index.at(to_paren(spec, oracle.sample(n, bits)))];
    }
    *classes_out = classes.size();
    return chi_square_test(observed, probs).p_value;
}

Line crit4() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t n : {4ull, 6ull, 8ull}) {
        std::uint64_t classes = 0;
        double p = chi_p_for(testutil::binary_spec(), n, true, 1, &classes);
        ok = ok && p > 1e-3;
        detail += fmt(" binary n=%llu(%lluc):p=%.3f",
                      (unsigned long long)n, (unsigned long long)classes, p);
    }
    // below the tilted range the pipeline's contract is the exact fallback
    for (std::uint64_t n : {3ull, 4ull, 5ull}) {
        std::uint64_t classes = 0;
        double p = chi_p_for(testutil::rhv_spec(), n, false, 1, &classes);
        ok = ok && p > 1e-3;
        detail += fmt(" rhv n=%llu(%lluc):p=%.3f", (unsigned long long)n,
                      (unsigned long long)classes, p);
    }
    return {ok, fmt("%s chi-square alpha=0.001:%s", ok ? "PASS" : "FAIL",
                    detail.c_str())};
}

// ---------------------------------------------------------------- C6 ----

struct DecadePoint {
    double t_per = 0;
    double restarts_per = 0;
    double mean_k = 0;
    double kappa_n = 0;
};

DecadePoint run_decade(const CombinatorialSpec& spec, std::uint64_t n,
                       int count, std::uint64_t seed) {
    auto ctx = build_bridge_context(spec, n);
    BitSource bits(seed);
    BridgeStats st;
    double ksum = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < count; ++i) {
        sample_bridge(ctx, n, bits, &st);
        ksum += double(st.k);
    }
    DecadePoint d;
    d.t_per = seconds_since(t0) / count;
    d.restarts_per = double(st.restarts) / count;
    d.mean_k = ksum / count;
    d.kappa_n = ctx.consts.kappa_star * double(ctx.plan.n_prime);
    return d;
}

Line crit6() {
    auto spec = testutil::rhv_spec();
    DecadePoint p3 = run_decade(spec, 1000, 16, 6001);
    progress("C6 size 10^4");
    DecadePoint p4 = run_decade(spec, 10000, 6, 6002);
    progress("C6 size 10^5");
    DecadePoint p5 = run_decade(spec, 100000, 3, 6003);

    double f1 = p4.t_per / p3.t_per;
    double f2 = p5.t_per / p4.t_per;
    double fitted = std::sqrt(p5.t_per / p3.t_per);
    double rfit = std::sqrt(p5.restarts_per / p3.restarts_per);
    bool ok = fitted >= 7.0 && fitted <= 15.0 && rfit < 2.0;
    return {ok,
            fmt("%s decade time factors {%.1f,%.1f} fitted %.2f in [7,15]; "
                "restart factor %.2f < 2 (restarts/sample %.0f/%.0f/%.0f, "
                "mean k %.0f/%.0f/%.0f vs %.0f/%.0f/%.0f)",
                ok ? "PASS" : "FAIL", f1, f2, fitted, rfit, p3.restarts_per,
                p4.restarts_per, p5.restarts_per, p3.mean_k, p4.mean_k,
                p5.mean_k, p3.kappa_n, p4.kappa_n, p5.kappa_n)};
}

// ---------------------------------------------------------------- C7 ----

bool prop_rotation() {
    std::mt19937_64 rng(7007);
    std::uniform_int_distribution<int> len_d(1, 16);
    std::uniform_int_distribution<int> dl_d(-1, 2);
    int built = 0;
    while (built < 10000) {
        int len = len_d(rng);
        std::vector<StepVec> steps(len);
        std::int64_t sum = 0;
        for (auto& s : steps) {
            s.dl = dl_d(rng);
            s.v = std::int64_t(rng() % 4);
            sum += s.dl;
        }
        if (sum != -1) continue;
        ++built;
        std::size_t j = cyc(steps);
        std::size_t valid = 0;
        for (std::size_t r = 0; r < steps.size(); ++r) {
            std::int64_t ps = 0;
            bool good = true;
            for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
                ps += steps[(r + i) % steps.size()].dl;
                if (ps < 0) {
                    good = false;
                    break;
                }
            }
            if (good && ++valid && r != j) return false;
        }
        if (valid != 1) return false;
    }
    return true;
}

bool prop_roundtrip() {
    struct Cfg {
        CombinatorialSpec spec;
        std::uint64_t max_n;
    };
    for (const auto& cfg : {Cfg{testutil::binary_spec(), 6},
                            Cfg{testutil::rhv_spec(), 4}}) {
        ExactOracle oracle(cfg.spec);
        for (std::uint64_t n = 1; n <= cfg.max_n; ++n)
            for (const auto& tree : oracle.enumerate(n, 10000)) {
                auto pieces = decompose_tree(cfg.spec, tree);
                std::uint64_t v = 0;
                std::int64_t dl = 0;
                for (const auto& p : pieces) {
                    v += p.v;
                    dl += std::int64_t(p.ell) - 1;
                }
                if (v != n || dl != -1) return false;
                if (!(assemble_tree(cfg.spec, pieces) == tree)) return false;
            }
    }
    return true;
}

bool prop_shuffle() {
    BitSource bits(7008);
    std::map<unsigned, std::uint64_t> hist;
    for (std::uint64_t i = 0; i < 200000; ++i) {
        auto s = bbhl_shuffle(3, 3, bits);
        unsigned code = 0;
        for (int b = 0; b < 6; ++b) code |= unsigned(s.seq[b]) << b;
        ++hist[code];
    }
    if (hist.size() != 20) return false;
    std::vector<std::uint64_t> observed;
    for (auto& [code, cnt] : hist) observed.push_back(cnt);
    std::vector<double> probs(20, 1.0 / 20);
    return chi_square_test(observed, probs).p_value > 1e-3;
}

bool prop_eigen() {
    std::mt19937_64 rng(7009);
    std::uniform_real_distribution<double> entry(0.1, 2.0);
    std::uniform_int_distribution<int> dim(3, 6);
    for (int trial = 0; trial < 50; ++trial) {
        int d = dim(rng);
        std::vector<std::vector<double>> m(d, std::vector<double>(d));
        for (auto& row : m)
            for (auto& e : row) e = entry(rng);
        auto scaled = m;
        for (int i = 0; i < d; ++i) scaled[i][0] *= 1.3;
        if (frobenius_eigenvalue(scaled).first <= frobenius_eigenvalue(m).first)
            return false;
    }
    return true;
}

bool prop_factorial() {
    const unsigned prec = 192;
    mpfr_t half_l2pi, lf, lnn, main_t, r, t;
    mpfr_inits2(prec, half_l2pi, lf, lnn, main_t, r, t, (mpfr_ptr)nullptr);
    mpfr_const_pi(half_l2pi, MPFR_RNDN);
    mpfr_mul_ui(half_l2pi, half_l2pi, 2, MPFR_RNDN);
    mpfr_log(half_l2pi, half_l2pi, MPFR_RNDN);
    mpfr_div_ui(half_l2pi, half_l2pi, 2, MPFR_RNDN);

    std::vector<std::uint64_t> grid;
    for (std::uint64_t n = 1; n <= 10000; ++n) grid.push_back(n);
    grid.push_back(100000);
    grid.push_back(1000000);

    mpz_class fact = 1;
    std::uint64_t fact_n = 0;
    std::uint64_t violations = 0;
    for (std::uint64_t n : grid) {
        if (n == fact_n + 1) {
            fact *= n;
        } else {
            mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
        }
        fact_n = n;
        mpfr_set_z(t, fact.get_mpz_t(), MPFR_RNDN);
        mpfr_log(lf, t, MPFR_RNDN);
        mpfr_set_ui(lnn, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_log(lnn, lnn, MPFR_RNDN);
        mpfr_set_d(main_t, 0.5, MPFR_RNDN);
        mpfr_add_ui(main_t, main_t, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_mul(main_t, main_t, lnn, MPFR_RNDN);
        mpfr_add(main_t, main_t, half_l2pi, MPFR_RNDN);
        mpfr_sub_ui(main_t, main_t, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_sub(r, lf, main_t, MPFR_RNDN);
        mpfr_mul_ui(t, r, static_cast<unsigned long>(12 * n + 1), MPFR_RNDN);
        if (mpfr_cmp_ui(t, 1) < 0) ++violations;
        mpfr_mul_ui(t, r, static_cast<unsigned long>(12 * n), MPFR_RNDN);
        if (mpfr_cmp_ui(t, 1) > 0) ++violations;
    }
    mpfr_clears(half_l2pi, lf, lnn, main_t, r, t, (mpfr_ptr)nullptr);
    return violations == 0;
}

bool prop_cbounds() {
    for (int i = -20; i <= 10; ++i) {
        double x = std::ldexp(1.0, i);
        auto ref = mpfr_c_func_cert(x, 256);
        double slack = 1e-13 * (1 + std::fabs(ref.mid()));
        if (c_lower_bound(x) > ref.lo + slack) return false;
        if (ref.hi > c_upper_bound(x) + slack) return false;
        double c = c_func(x);
        if (c < ref.lo - slack || c > ref.hi + slack) return false;
    }
    return true;
}

Line crit7() {
    struct Prop {
        const char* name;
        bool (*run)();
    };
    const Prop props[] = {
        {"rotation", prop_rotation},   {"roundtrip", prop_roundtrip},
        {"shuffle", prop_shuffle},     {"eigen-monotone", prop_eigen},
        {"factorial-bracket", prop_factorial}, {"c-bounds", prop_cbounds}};
    bool ok = true;
    std::string detail;
    for (const auto& p : props) {
        bool good = p.run();
        ok = ok && good;
        detail += fmt(" %s:%s", p.name, good ? "ok" : "FAIL");
    }
    return {ok, fmt("%s property suites:%s", ok ? "PASS" : "FAIL",
                    detail.c_str())};
}

// ---------------------------------------------------------------- C8 ----

Line crit8() {
#ifdef CFBOLTZ_CLI_PATH
    const char* cmds[] = {
        "sample --model rhv -n 300 -c 2 --seed 9",
        "sample --model binary -n 2000 -c 4 --seed 17 -j 2 --format jsonl",
    };
    for (const char* cmd : cmds) {
        auto a = testutil::run_cli(cmd);
        auto b = testutil::run_cli(cmd);
        if (a.status != 0 || b.status != 0)
            return {false, fmt("FAIL cli exit %d/%d for '%s'", a.status,
                               b.status, cmd)};
        if (a.out != b.out)
            return {false, fmt("FAIL outputs differ for '%s'", cmd)};
    }
    return {true, "PASS identical CLI reruns are byte-equal (2 commands)"};
#else
    return {false, "FAIL cli path not configured"};
#endif
}

// ---------------------------------------------------------------- C5 ----

std::vector<std::int64_t> composition(std::uint64_t total, std::uint64_t k,
                                      bool extreme, std::mt19937_64& rng) {
    std::vector<std::int64_t> ut(k, 1);
    std::uint64_t extra = total - k;
    if (extreme) {
        ut[rng() % k] += std::int64_t(extra);
    } else {
        ut.assign(k, std::int64_t(total / k));
        for (std::uint64_t i = 0; i < total % k; ++i) ++ut[i];
    }
    return ut;
}

Line crit5() {
    bool audit_ok = true;
    std::uint64_t audited = 0;
    std::mt19937_64 rng(5005);
    struct M {
        const char* name;
        CombinatorialSpec spec;
    };
    const M models[] = {{"binary", testutil::binary_spec()},
                        {"rhv", testutil::rhv_spec()}};
    for (const auto& m : models) {
        for (std::uint64_t n : {100ull, 1000ull}) {
            auto ctx = build_bridge_context(m.spec, n);
            const std::uint64_t np = ctx.plan.n_prime;
            for (int i = 0; i < 2500; ++i) {
                std::uint64_t k = 1 + rng() % np;
                auto ut = composition(np, k, i % 2 == 1, rng);
                std::uint64_t mm =
                    i % 3 == 0 ? 0
                    : i % 3 == 1 ? std::uint64_t(ctx.plan.m_star)
                                 : std::uint64_t(ctx.plan.m_star) + 7;
                auto [r, e] = log_acceptance(ctx.plan, ut, k, mm);
                ++audited;
                if (r + e > 0) audit_ok = false;
            }
            // re-certify configurations the sampler actually accepted
            int draws = m.spec.count() == 1 ? 100 : (n == 100 ? 30 : 0);
            BitSource bits(5006 + n);
            for (int i = 0; i < draws; ++i) {
                auto pieces = sample_bridge(ctx, n, bits);
                std::vector<std::int64_t> ut;
                std::uint64_t k = 0, mm = 0;
                for (const auto& p : pieces) {
                    std::int64_t u = std::int64_t(p.v) +
                                     std::int64_t(ctx.catalog.v0) *
                                         (std::int64_t(p.ell) - 1);
                    if (u == 0)
                        ++mm;
                    else {
                        ut.push_back(u);
                        ++k;
                    }
                }
                auto [r, e] = log_acceptance(ctx.plan, ut, k, mm);
                ++audited;
                if (r + e > 0) audit_ok = false;
            }
        }
    }

    // normalizer constant of the scanned family against its limit
    std::string scan_detail;
    bool scan_ok = true;
    for (std::uint64_t n : {1000ull, 10000ull, 100000ull}) {
        auto ctx = build_bridge_context(testutil::binary_spec(), n);
        double c = std::exp(-ctx.plan.scan_max) /
                   std::pow(double(ctx.plan.n_prime), 1.5);
        scan_ok = scan_ok && c >= 0.8 * 15.8874 && c <= 1.2 * 15.8874;
        scan_detail += fmt(" %.4g", c);
    }

    bool ok = g_breaches == 0 && audit_ok && scan_ok;
    return {ok,
            fmt("%s breaches=%llu; %llu certified ratios <= 0:%s; scan "
                "constants{%s } in 15.887+-20%%",
                ok ? "PASS" : "FAIL", (unsigned long long)g_breaches,
                (unsigned long long)audited, audit_ok ? " all" : " VIOLATED",
                scan_detail.c_str())};
}

}  // namespace

int main() {
    Line results[8];
    results[0] = guarded_criterion("C1 critical solver", crit1);
    results[1] = guarded_criterion("C2 solution certificates", crit2);
    results[2] = guarded_criterion("C3 toy sampler limits", crit3);
    results[3] = guarded_criterion("C4 exact-law chi-square", crit4);
    results[5] = guarded_criterion("C6 decade scaling", crit6);
    results[6] = guarded_criterion("C7 property suites", crit7);
    results[7] = guarded_criterion("C8 reproducibility", crit8);
    // last: C5 aggregates breach counts from every workload above
    results[4] = guarded_criterion("C5 certified acceptance audit", crit5);

    bool all = true;
    for (int i = 0; i < 8; ++i) {
        std::printf("C%d %s\n", i + 1, results[i].text.c_str());
        all = all && results[i].pass;
    }
    std::fflush(stdout);
    return all ? 0 : 1;
}
