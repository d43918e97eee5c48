#include "cfboltz/certmath.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include <gmpxx.h>
#include <mpfr.h>

namespace cfboltz {

namespace {

double step_down(double v, int n) {
    for (int i = 0; i < n; ++i)
        v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    return v;
}

double step_up(double v, int n) {
    for (int i = 0; i < n; ++i)
        v = std::nextafter(v, std::numeric_limits<double>::infinity());
    return v;
}

const DInterval kLn2 = DInterval::of(step_down(M_LN2, 1), step_up(M_LN2, 1));

}  // namespace

DInterval DInterval::padded(int ulps) const {
    return {step_down(lo, ulps), step_up(hi, ulps)};
}

DInterval DInterval::operator+(const DInterval& o) const {
    return DInterval{lo + o.lo, hi + o.hi}.padded(1);
}

DInterval DInterval::operator-(const DInterval& o) const {
    return DInterval{lo - o.hi, hi - o.lo}.padded(1);
}

DInterval DInterval::operator*(const DInterval& o) const {
    double a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    return DInterval{std::min(std::min(a, b), std::min(c, d)),
                     std::max(std::max(a, b), std::max(c, d))}
        .padded(1);
}

DInterval i_log(const DInterval& x) {
    return DInterval{std::log(x.lo), std::log(x.hi)}.padded(4);
}

DInterval i_exp(const DInterval& x) {
    return DInterval{std::exp(x.lo), std::exp(x.hi)}.padded(4);
}

namespace {

double lncosh_point(double a) {
    if (a < 1) {
        double s = std::sinh(a / 2);
        return std::log1p(2 * s * s);
    }
    return a + std::log1p(std::exp(-2 * a)) - M_LN2;
}

}  // namespace

DInterval i_lncosh(const DInterval& t) {
    double alo, ahi;
    if (t.lo >= 0) {
        alo = t.lo;
        ahi = t.hi;
    } else if (t.hi <= 0) {
        alo = -t.hi;
        ahi = -t.lo;
    } else {
        alo = 0;
        ahi = std::max(-t.lo, t.hi);
    }
    DInterval r{lncosh_point(alo), lncosh_point(ahi)};
    r = r.padded(8);
    // under the branch at a >= 1 the intermediate magnitude is ~a, so pad
    // absolutely as well
    double pad = 8 * DBL_EPSILON * std::max(1.0, ahi);
    r.lo -= pad;
    r.hi += pad;
    if (r.lo < 0) r.lo = 0;  // ln cosh is nonnegative
    return r;
}

namespace {

double lnavgexp_point(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m)) - M_LN2;
}

}  // namespace

DInterval i_lnavgexp(const DInterval& a, const DInterval& b) {
    DInterval r{lnavgexp_point(a.lo, b.lo), lnavgexp_point(a.hi, b.hi)};
    r = r.padded(8);
    // the shift magnitude dominates the intermediate scale
    double mag = std::max({std::abs(a.lo), std::abs(a.hi), std::abs(b.lo),
                           std::abs(b.hi), 1.0});
    r.lo -= 8 * DBL_EPSILON * mag;
    r.hi += 8 * DBL_EPSILON * mag;
    return r;
}

DInterval lnfact_cert(std::uint64_t n) {
    if (n <= 1) return DInterval::exact(0.0);
    if (n <= 256) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
        long e2;
        double d = mpz_get_d_2exp(&e2, f.get_mpz_t());  // truncated toward 0
        DInterval dI = DInterval::of(d, step_up(d, 2));
        return i_log(dI) + DInterval::exact(static_cast<double>(e2)) * kLn2;
    }
    const double x = static_cast<double>(n);
    // S(x) = ln sqrt(2 pi x) + x (ln x - 1); Robbins brackets:
    // S + 1/(12x+1) <= ln x! <= S + 1/(12x)
    DInterval lx = i_log(DInterval::exact(x));
    DInterval s =
        i_log(DInterval::exact(2 * M_PI).padded(2) * DInterval::exact(x)) *
            DInterval::exact(0.5) +
        DInterval::exact(x) * (lx - DInterval::exact(1.0));
    DInterval r{s.lo + 1 / (12 * x + 1), s.hi + 1 / (12 * x)};
    return r.padded(2);
}

DInterval lngamma_cert(std::uint64_t n) { return lnfact_cert(n - 1); }

double digamma(double x) {
    double acc = 0;
    while (x < 12) {
        acc -= 1 / x;
        x += 1;
    }
    const double r = 1 / x, r2 = r * r;
    double v = std::log(x) - r / 2;
    v -= r2 * (1.0 / 12 -
               r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (1.0 / 240 - r2 / 132))));
    return acc + v;
}

double trigamma(double x) {
    double acc = 0;
    while (x < 12) {
        acc += 1 / (x * x);
        x += 1;
    }
    const double r = 1 / x, r2 = r * r;
    double v = r + r2 / 2;
    v += r * r2 *
         (1.0 / 6 - r2 * (1.0 / 30 - r2 * (1.0 / 42 - r2 * (1.0 / 30 - r2 * 5 / 66))));
    return acc + v;
}

double c_func(double x) {
    const double s = std::sqrt(x);
    return s * std::tanh(s) - lncosh_point(s);
}

double c_lower_bound(double x) { return 3 * x * (12 + x) / ((6 + x) * (12 + 5 * x)); }

double c_upper_bound(double x) {
    return 3 * x * (6 + x) / (4 * (3 + x) * (3 + x));
}

DInterval mpfr_log_cert(double v, unsigned prec) {
    mpfr_t t, r;
    mpfr_init2(t, prec);
    mpfr_init2(r, prec);
    mpfr_set_d(t, v, MPFR_RNDN);  // exact: double fits
    DInterval out;
    mpfr_log(r, t, MPFR_RNDD);
    out.lo = mpfr_get_d(r, MPFR_RNDD);
    mpfr_log(r, t, MPFR_RNDU);
    out.hi = mpfr_get_d(r, MPFR_RNDU);
    mpfr_clear(t);
    mpfr_clear(r);
    return out;
}

DInterval mpfr_lnfact_cert(std::uint64_t n, unsigned prec) {
    mpfr_t t, r;
    mpfr_init2(t, prec);
    mpfr_init2(r, prec);
    mpfr_set_ui(t, static_cast<unsigned long>(n + 1), MPFR_RNDN);
    DInterval out;
    mpfr_lngamma(r, t, MPFR_RNDD);
    out.lo = mpfr_get_d(r, MPFR_RNDD);
    mpfr_lngamma(r, t, MPFR_RNDU);
    out.hi = mpfr_get_d(r, MPFR_RNDU);
    mpfr_clear(t);
    mpfr_clear(r);
    return out;
}

DInterval mpfr_lncosh_cert(double t, unsigned prec) {
    mpfr_t a, c, r;
    mpfr_init2(a, prec);
    mpfr_init2(c, prec);
    mpfr_init2(r, prec);
    mpfr_set_d(a, std::abs(t), MPFR_RNDN);
    DInterval out;
    mpfr_cosh(c, a, MPFR_RNDD);
    mpfr_log(r, c, MPFR_RNDD);
    out.lo = mpfr_get_d(r, MPFR_RNDD);
    mpfr_cosh(c, a, MPFR_RNDU);
    mpfr_log(r, c, MPFR_RNDU);
    out.hi = mpfr_get_d(r, MPFR_RNDU);
    mpfr_clear(a);
    mpfr_clear(c);
    mpfr_clear(r);
    return out;
}

DInterval mpfr_c_func_cert(double x, unsigned prec) {
    // c = s tanh(s) - ln cosh(s), s = sqrt(x); the two pieces get opposite
    // rounding directions per side
    mpfr_t xm, s, th, prod, ch, lc, res;
    mpfr_inits2(prec, xm, s, th, prod, ch, lc, res, (mpfr_ptr) nullptr);
    mpfr_set_d(xm, x, MPFR_RNDN);
    DInterval out;

    mpfr_sqrt(s, xm, MPFR_RNDD);
    mpfr_tanh(th, s, MPFR_RNDD);
    mpfr_mul(prod, s, th, MPFR_RNDD);
    mpfr_sqrt(s, xm, MPFR_RNDU);
    mpfr_cosh(ch, s, MPFR_RNDU);
    mpfr_log(lc, ch, MPFR_RNDU);
    mpfr_sub(res, prod, lc, MPFR_RNDD);
    out.lo = mpfr_get_d(res, MPFR_RNDD);

    mpfr_sqrt(s, xm, MPFR_RNDU);
    mpfr_tanh(th, s, MPFR_RNDU);
    mpfr_mul(prod, s, th, MPFR_RNDU);
    mpfr_sqrt(s, xm, MPFR_RNDD);
    mpfr_cosh(ch, s, MPFR_RNDD);
    mpfr_log(lc, ch, MPFR_RNDD);
    mpfr_sub(res, prod, lc, MPFR_RNDU);
    out.hi = mpfr_get_d(res, MPFR_RNDU);

    mpfr_clears(xm, s, th, prod, ch, lc, res, (mpfr_ptr) nullptr);
    return out;
}

}  // namespace cfboltz
