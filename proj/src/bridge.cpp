#include "cfboltz/bridge.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cfboltz/errors.hpp"
#include "cfboltz/shuffle.hpp"

namespace cfboltz {

namespace {

// Increment of the m-direction profile at fixed k:
// G(k, m+1) - G(k, m) = ln((k+m) a0) - ln(m+1), decreasing in m.
DInterval delta_g(std::uint64_t k, std::uint64_t m, const DInterval& ln_a0) {
    return i_log(DInterval::exact(double(k + m))) + ln_a0 -
           i_log(DInterval::exact(double(m + 1)));
}

}  // namespace

double solve_mstar(std::uint64_t k, double a0, double tol) {
    const double la = std::log(a0);
    // at m = 0 the defining function is H_{k-1} + ln a0
    if (digamma(double(k)) - digamma(1.0) + la <= 0) return 0.0;
    double m = std::max(0.5, (double(k) * a0 - 1) / (1 - a0));
    for (int it = 0; it < 200; ++it) {
        double h = digamma(m + double(k)) - digamma(m + 1) + la;
        double dh = trigamma(m + double(k)) - trigamma(m + 1);  // < 0
        double next = m - h / dh;
        if (next < 0) next = 0;
        bool done = std::abs(next - m) <= tol * (1 + std::abs(m));
        m = next;
        if (done) break;
    }
    return m;
}

AcceptancePlan build_acceptance_plan(const DerivedConstants& consts,
                                     const MixtureMeasure& mix,
                                     std::uint64_t n) {
    AcceptancePlan p;
    p.n = n;
    p.n_prime = mix.n_prime;
    p.x = mix.x;
    p.x_minus = mix.points[1].xi;
    p.cosh_norm = mix.cosh_norm;
    p.a0 = consts.a0;
    p.aneq = consts.aneq;
    p.ln_a0 = i_log(DInterval::exact(p.a0));
    p.ln_aneq = i_log(DInterval::exact(p.aneq));
    p.ln_cosh_norm = i_log(DInterval::exact(p.cosh_norm));
    p.ln_c = DInterval::exact(double(p.n_prime)) * p.ln_cosh_norm;

    const std::uint64_t np = p.n_prime;
    const DInterval xpnp =
        DInterval::exact(p.x) * DInterval::exact(double(np));
    const DInterval xmnp =
        DInterval::exact(p.x_minus) * DInterval::exact(double(np));
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t kd = 1;
    double prev_lo = 0, prev_hi = 0;
    std::uint64_t prev_mh = 0;
    bool have_prev = false;
    int last_sign = 0;
    int flips = 0;
    for (std::uint64_t k = 1; k <= np; ++k) {
        // integer peak of the m-profile: increments stay positive while
        // m < (k a0 - 1)/(1 - a0), then turn negative
        double mc = (double(k) * p.a0 - 1) / (1 - p.a0);
        std::uint64_t mh = mc > 0 ? std::uint64_t(mc) + 1 : 0;
        int guard = 0;
        while (delta_g(k, mh, p.ln_a0).lo > 0) {
            ++mh;
            if (++guard > 1000) throw Error("peak adjustment diverged");
        }
        while (mh > 0 && delta_g(k, mh - 1, p.ln_a0).hi < 0) {
            --mh;
            if (++guard > 1000) throw Error("peak adjustment diverged");
        }

        DInterval g = lnfact_cert(k + mh - 1) - lnfact_cert(k) -
                      lnfact_cert(mh);
        g = g + DInterval::exact(double(k)) * p.ln_aneq;
        if (mh > 0) g = g + DInterval::exact(double(mh)) * p.ln_a0;
        // convexity collapses the per-step reweight product to the equal
        // split; the reweight log need not be monotone in the step, but the
        // argument interval contains n'/k, so the enclosure stands
        const DInterval split = DInterval::exact(1.0 / double(k)).padded(2);
        g = g - DInterval::exact(double(k)) *
                    i_lnavgexp(xpnp * split, xmnp * split);

        // the continuous peak sits within one unit of mh; a tangent step of
        // length one is bounded by the adjacent chord magnitudes
        double slack = 0;
        if (mh > 0) {
            slack = std::max(slack, delta_g(k, mh - 1, p.ln_a0).hi);
            slack = std::max(slack, -delta_g(k, mh, p.ln_a0).lo);
        } else if (k >= 2) {
            // derivative at 0 is H_{k-1} + ln a0, and H_{k-1} <= 1 + ln(k-1)
            slack = std::max(
                slack, 1.0 + std::log(double(k - 1)) + 1e-12 + p.ln_a0.hi);
        }
        // an increment sign that is not certified at mh contributes below
        // 1e-13; four chord widths plus the margin absorb it
        slack += 4 * std::max(0.0, delta_g(k, mh, p.ln_a0).hi);

        double bk = g.hi + slack;
        if (bk > best) {
            best = bk;
            kd = k;
        }
        if (have_prev) {
            // unimodality is a property of the continuous-m envelope; the
            // integer peak scallops the profile by up to ~1/(8 mh), so only
            // moves clearing that band plus the enclosure widths count.
            // The first few k sit in an exponentially suppressed pit (the
            // per-step reweight argument is ~eps*sqrt(n')), so counting
            // starts at the first certified rise
            const double band = 0.25 / double(std::min(mh, prev_mh) + 1);
            if (g.lo > prev_hi + band) {
                if (last_sign < 0) ++flips;
                last_sign = 1;
            } else if (g.hi < prev_lo - band && last_sign != 0) {
                if (last_sign > 0) ++flips;
                last_sign = -1;
            }
        }
        prev_lo = g.lo;
        prev_hi = g.hi;
        prev_mh = mh;
        have_prev = true;
    }
    p.scan_max = best;
    p.scan_margin = 1e-7;
    p.log_kn = -best - p.ln_c.hi - p.scan_margin;
    p.kn = std::exp(p.log_kn);
    p.k_dagger = kd;
    p.m_star = solve_mstar(kd, p.a0);
    p.scan_sign_changes = flips;
    return p;
}

namespace {

DInterval certified_log_ratio(const AcceptancePlan& p,
                              const std::vector<std::int64_t>& ut,
                              std::uint64_t k, std::uint64_t m) {
    DInterval g = DInterval::exact(p.log_kn) + lnfact_cert(k + m - 1) -
                  lnfact_cert(k) - lnfact_cert(m);
    g = g + DInterval::exact(double(k)) * p.ln_aneq;
    if (m > 0) g = g + DInterval::exact(double(m)) * p.ln_a0;
    g = g + DInterval::exact(double(k)) * p.ln_cosh_norm;
    const DInterval xp = DInterval::exact(p.x);
    const DInterval xm = DInterval::exact(p.x_minus);
    for (std::int64_t u : ut) {
        const DInterval du = DInterval::exact(double(u));
        g = g - i_lnavgexp(xp * du, xm * du);
    }
    return g;
}

[[noreturn]] void throw_breach(std::uint64_t k, std::uint64_t m,
                               const DInterval& g) {
    throw InvariantBreach("acceptance certification violated: k=" +
                          std::to_string(k) + " m=" + std::to_string(m) +
                          " log ratio lower bound " + std::to_string(g.lo));
}

// Directed full-precision log ratio; every rounding moves the result
// toward `dir`, so two calls give a genuine enclosure.
void logr_dir(const AcceptancePlan& p, const std::vector<std::int64_t>& ut,
              std::uint64_t k, std::uint64_t m, mpfr_prec_t prec,
              mpfr_rnd_t dir, mpfr_t out) {
    const mpfr_rnd_t inv = dir == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD;
    mpfr_t t, s;
    mpfr_init2(t, prec);
    mpfr_init2(s, prec);
    mpfr_set_d(out, p.log_kn, MPFR_RNDN);
    mpfr_set_ui(t, k + m, MPFR_RNDN);
    mpfr_lngamma(t, t, dir);
    mpfr_add(out, out, t, dir);
    mpfr_set_ui(t, k + 1, MPFR_RNDN);
    mpfr_lngamma(t, t, inv);
    mpfr_sub(out, out, t, dir);
    mpfr_set_ui(t, m + 1, MPFR_RNDN);
    mpfr_lngamma(t, t, inv);
    mpfr_sub(out, out, t, dir);
    mpfr_set_d(t, p.aneq, MPFR_RNDN);
    mpfr_log(t, t, dir);
    mpfr_mul_ui(t, t, k, dir);
    mpfr_add(out, out, t, dir);
    if (m > 0) {
        mpfr_set_d(t, p.a0, MPFR_RNDN);
        mpfr_log(t, t, dir);
        mpfr_mul_ui(t, t, m, dir);
        mpfr_add(out, out, t, dir);
    }
    mpfr_set_d(t, p.cosh_norm, MPFR_RNDN);
    mpfr_log(t, t, dir);
    mpfr_mul_ui(t, t, k, dir);
    mpfr_add(out, out, t, dir);
    mpfr_t e2;
    mpfr_init2(e2, prec);
    for (std::int64_t u : ut) {
        // each factor of (e^{x+ u} + e^{x- u})/2 rounds toward `inv`;
        // exp is increasing, so directed products stay directed
        mpfr_set_d(t, p.x, MPFR_RNDN);
        mpfr_mul_ui(t, t, static_cast<unsigned long>(u), inv);
        mpfr_exp(s, t, inv);
        mpfr_set_d(t, p.x_minus, MPFR_RNDN);
        mpfr_mul_ui(t, t, static_cast<unsigned long>(u), inv);
        mpfr_exp(e2, t, inv);
        mpfr_add(s, s, e2, inv);
        mpfr_div_2ui(s, s, 1, inv);
        mpfr_log(s, s, inv);
        mpfr_sub(out, out, s, dir);
    }
    mpfr_clear(t);
    mpfr_clear(s);
    mpfr_clear(e2);
}

// U is pinned down bit by bit; the log ratio enclosure is recomputed at
// doubling precision whenever it becomes the blocker.
bool decide_escalated(const AcceptancePlan& p,
                      const std::vector<std::int64_t>& ut, std::uint64_t k,
                      std::uint64_t m, BitSource& bits, mpz_class a, long b,
                      std::uint64_t* escalations) {
    for (mpfr_prec_t prec = 256; prec <= (1 << 16); prec *= 2) {
        if (escalations) ++*escalations;
        mpfr_t rlo, rhi, rwid;
        mpfr_init2(rlo, prec);
        mpfr_init2(rhi, prec);
        mpfr_init2(rwid, prec);
        logr_dir(p, ut, k, m, prec, MPFR_RNDD, rlo);
        logr_dir(p, ut, k, m, prec, MPFR_RNDU, rhi);
        mpfr_sub(rwid, rhi, rlo, MPFR_RNDU);
        int verdict = -1;
        while (verdict < 0) {
            mpfr_prec_t uprec = std::max<mpfr_prec_t>(prec, b + 64);
            mpfr_t lo, hi, l2, uwid;
            mpfr_init2(lo, uprec);
            mpfr_init2(hi, uprec);
            mpfr_init2(l2, uprec);
            mpfr_init2(uwid, uprec);
            // lnU in [ln a - b ln2, ln(a+1) - b ln2]
            mpz_class a1 = a + 1;
            mpfr_set_z(hi, a1.get_mpz_t(), MPFR_RNDU);
            mpfr_log(hi, hi, MPFR_RNDU);
            mpfr_const_log2(l2, MPFR_RNDD);
            mpfr_mul_ui(l2, l2, static_cast<unsigned long>(b), MPFR_RNDD);
            mpfr_sub(hi, hi, l2, MPFR_RNDU);
            if (mpfr_cmp(hi, rlo) < 0) verdict = 1;
            bool u_blocked = false;
            if (verdict < 0 && a > 0) {
                mpfr_set_z(lo, a.get_mpz_t(), MPFR_RNDD);
                mpfr_log(lo, lo, MPFR_RNDD);
                mpfr_const_log2(l2, MPFR_RNDU);
                mpfr_mul_ui(l2, l2, static_cast<unsigned long>(b), MPFR_RNDU);
                mpfr_sub(lo, lo, l2, MPFR_RNDD);
                if (mpfr_cmp(lo, rhi) > 0) verdict = 0;
                if (verdict < 0) {
                    mpfr_sub(uwid, hi, lo, MPFR_RNDU);
                    u_blocked = mpfr_cmp(uwid, rwid) < 0;
                }
            }
            mpfr_clear(lo);
            mpfr_clear(hi);
            mpfr_clear(l2);
            mpfr_clear(uwid);
            if (verdict < 0) {
                if (u_blocked) break;  // tighten the ratio enclosure instead
                a <<= 64;
                a += mpz_class(bits.bits(64));
                b += 64;
            }
        }
        mpfr_clear(rlo);
        mpfr_clear(rhi);
        mpfr_clear(rwid);
        if (verdict >= 0) return verdict == 1;
    }
    throw InvariantBreach("acceptance comparison did not separate");
}

bool accept_with_rate(const AcceptancePlan& p,
                      const std::vector<std::int64_t>& ut, std::uint64_t k,
                      std::uint64_t m, BitSource& bits,
                      std::uint64_t* escalations) {
    DInterval lr = certified_log_ratio(p, ut, k, m);
    if (lr.lo > 0) throw_breach(k, m, lr);
    DInterval rr = i_exp(lr);
    std::uint64_t a = 0;
    int b = 0;
    while (b < 53) {
        a = (a << 1) | (bits.bit() ? 1u : 0u);
        ++b;
        // U in [a/2^b, (a+1)/2^b], both endpoints exact below 2^53
        if (std::ldexp(double(a + 1), -b) <= rr.lo) return true;
        if (std::ldexp(double(a), -b) >= rr.hi) return false;
    }
    return decide_escalated(p, ut, k, m, bits, mpz_class(a), b, escalations);
}

}  // namespace

std::pair<double, double> log_acceptance(const AcceptancePlan& plan,
                                         const std::vector<std::int64_t>& u_tilde,
                                         std::uint64_t k, std::uint64_t m) {
    DInterval g = certified_log_ratio(plan, u_tilde, k, m);
    if (g.lo > 0) throw_breach(k, m, g);
    double mid = g.mid();
    double err = std::max(g.hi - mid, mid - g.lo);
    err = std::nextafter(std::nextafter(err, 1e300), 1e300);
    return {mid, err};
}

BridgeContext build_bridge_context(const CombinatorialSpec& spec,
                                   std::uint64_t n) {
    BridgeContext ctx;
    ctx.spec = spec;
    ctx.catalog = compute_catalog(spec);
    ctx.crit = solve_characteristic(spec);
    ctx.consts = derived_constants(spec, ctx.crit, ctx.catalog);
    if (n < ctx.catalog.v0) throw EmptySizeClass(n);
    if (n == ctx.catalog.v0) {
        ctx.degenerate = true;
        ctx.plan.n = n;
        ctx.plan.n_prime = 0;
        return ctx;
    }
    ctx.mix = make_mixture(spec, ctx.crit, ctx.consts, ctx.catalog, n);
    ctx.tables = build_offspring_table(spec, ctx.mix);
    ctx.plan = build_acceptance_plan(ctx.consts, ctx.mix, n);
    // Expected tries scale like n'^{3/2} exp(-logKn). Near the small end of
    // the admissible range the certified constant collapses and the walk
    // would grind through the whole restart budget; send such sizes to the
    // oracle path instead.
    const double est_log_tries =
        1.5 * std::log(double(ctx.plan.n_prime)) - ctx.plan.log_kn;
    if (est_log_tries > std::log(double(ctx.restart_budget) / 4))
        throw SizeTooSmall(n);
    return ctx;
}

std::vector<Subtree> sample_bridge(const BridgeContext& ctx, std::uint64_t n,
                                   BitSource& bits, BridgeStats* stats) {
    if (n != ctx.plan.n) throw Error("context was built for a different size");
    BridgeStats fallback;
    BridgeStats& st = stats ? *stats : fallback;
    if (ctx.degenerate) {
        st.k = 0;
        st.m = 1;
        std::vector<Subtree> out;
        out.push_back(sample_subtree_mu0(ctx.catalog, bits));
        return out;
    }
    const std::int64_t v0 = std::int64_t(ctx.catalog.v0);
    const std::int64_t np = std::int64_t(ctx.plan.n_prime);
    std::vector<Subtree> pieces;
    std::vector<std::int64_t> ut;
    for (std::uint64_t fails = 0; fails <= ctx.restart_budget;) {
        pieces.clear();
        ut.clear();
        std::int64_t i = 0, j = 0;
        while (i + v0 * j < np) {
            auto [sub, pt] = sample_subtree_neq(ctx.spec, ctx.catalog, ctx.mix,
                                                ctx.tables, bits);
            (void)pt;
            i += std::int64_t(sub.v);
            j += std::int64_t(sub.ell) - 1;
            ut.push_back(std::int64_t(sub.v) + v0 * (std::int64_t(sub.ell) - 1));
            pieces.push_back(std::move(sub));
        }
        if (i + v0 * j == np && j >= -1) {
            ++st.reaches;
            std::uint64_t k = pieces.size();
            std::uint64_t m = std::uint64_t(j + 1);
            if (accept_with_rate(ctx.plan, ut, k, m, bits, &st.escalations)) {
                st.k = k;
                st.m = m;
                for (std::uint64_t t = 0; t < m; ++t)
                    pieces.push_back(sample_subtree_mu0(ctx.catalog, bits));
                BinaryShuffle sh = bbhl_shuffle(k, m, bits);
                std::vector<Subtree> out;
                out.reserve(k + m);
                std::size_t wi = 0, zi = k;
                for (std::uint8_t one : sh.seq)
                    out.push_back(std::move(pieces[one ? wi++ : zi++]));
                return out;
            }
        }
        ++fails;
        ++st.restarts;
    }
    throw RestartBudgetExceeded("no accepted walk within " +
                                std::to_string(ctx.restart_budget) +
                                " restarts at size " + std::to_string(n));
}

ColoredTree sample_excursion(const BridgeContext& ctx, std::uint64_t n,
                             BitSource& bits, BridgeStats* stats) {
    std::vector<Subtree> list = sample_bridge(ctx, n, bits, stats);
    std::vector<StepVec> steps;
    steps.reserve(list.size());
    for (const Subtree& s : list)
        steps.push_back({std::int64_t(s.v), std::int64_t(s.ell) - 1});
    std::size_t r = cyc(steps);
    std::rotate(list.begin(), list.begin() + std::ptrdiff_t(r), list.end());
    return assemble_tree(ctx.spec, list);
}

}  // namespace cfboltz
