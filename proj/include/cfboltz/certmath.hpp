#pragma once

#include <cstdint>

namespace cfboltz {

// Closed double interval guaranteed to contain the exact real value.
// All operations round outward by explicit ulp padding.
struct DInterval {
    double lo = 0;
    double hi = 0;

    static DInterval exact(double v) { return {v, v}; }
    static DInterval of(double lo, double hi) { return {lo, hi}; }

    double mid() const { return lo + (hi - lo) / 2; }
    double width() const { return hi - lo; }
    DInterval padded(int ulps) const;

    DInterval operator+(const DInterval& o) const;
    DInterval operator-(const DInterval& o) const;
    DInterval operator-() const { return {-hi, -lo}; }
    DInterval operator*(const DInterval& o) const;
};

// Natural log / exp over intervals; log requires a positive interval.
DInterval i_log(const DInterval& x);
DInterval i_exp(const DInterval& x);

// ln cosh(t), evaluated cancellation-free on either side of t = 1.
DInterval i_lncosh(const DInterval& t);

// ln((e^a + e^b)/2), the two-point reweight log. Increasing in each
// argument, so corner evaluation encloses; max-shifted against overflow.
DInterval i_lnavgexp(const DInterval& a, const DInterval& b);

// ln(n!) — exact big-integer factorial for small n, Stirling with the
// Robbins remainder brackets beyond.
DInterval lnfact_cert(std::uint64_t n);
// ln Gamma(n) for integer n >= 1.
DInterval lngamma_cert(std::uint64_t n);

// Asymptotic-series evaluations, absolute error below 1e-13 for x > 0.
double digamma(double x);
double trigamma(double x);

// c(x) = sqrt(x) tanh(sqrt(x)) - ln cosh(sqrt(x)), with its two-sided
// rational bounds.
double c_func(double x);
double c_lower_bound(double x);
double c_upper_bound(double x);

// High-precision escalation paths: directed rounding at `prec` bits.
DInterval mpfr_log_cert(double v, unsigned prec);
DInterval mpfr_lnfact_cert(std::uint64_t n, unsigned prec);
DInterval mpfr_lncosh_cert(double t, unsigned prec);
DInterval mpfr_c_func_cert(double x, unsigned prec);

}  // namespace cfboltz
