#include "cfboltz/stats.hpp"

#include <cmath>
#include <cstdint>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

// Series expansion of P(a,x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw Error("incomplete gamma series did not converge");
}

// Lentz continued fraction for Q(a,x), effective for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a;
    double c = 1 / tiny;
    double d = 1 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw Error("incomplete gamma fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw Error("incomplete gamma domain");
    if (x == 0) return 0;
    if (x < a + 1) return gamma_p_series(a, x);
    return 1 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw Error("incomplete gamma domain");
    if (x == 0) return 1;
    if (x < a + 1) return 1 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, std::uint64_t dof) {
    if (dof == 0) return 1;
    return gamma_q(double(dof) / 2, stat / 2);
}

ChiSquare chi_square_test(std::span<const std::uint64_t> observed,
                          std::span<const double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw Error("mismatched chi-square inputs");
    std::uint64_t total = 0;
    for (std::uint64_t o : observed) total += o;
    double stat = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probs[i] * double(total);
        if (e <= 0) throw Error("chi-square class with zero expectation");
        double d = double(observed[i]) - e;
        stat += d * d / e;
    }
    ChiSquare out;
    out.stat = stat;
    out.dof = observed.size() - 1;
    out.p_value = chi_square_pvalue(stat, out.dof);
    return out;
}

}  // namespace cfboltz
