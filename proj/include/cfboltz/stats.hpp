#pragma once

#include <cstdint>
#include <span>

namespace cfboltz {

struct ChiSquare {
    double stat = 0;
    std::uint64_t dof = 0;
    double p_value = 1;
};

// Pearson statistic of observed counts against expected class
// probabilities (scaled by the total), dof = classes - 1.
ChiSquare chi_square_test(std::span<const std::uint64_t> observed,
                          std::span<const double> expected_probs);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_pvalue(double stat, std::uint64_t dof);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

}  // namespace cfboltz
