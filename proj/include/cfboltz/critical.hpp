#pragma once

#include <utility>
#include <vector>

#include "cfboltz/catalog.hpp"
#include "cfboltz/spec.hpp"

namespace cfboltz {

// Joint solution of Phi(z,y) = y and det(I - dPhi/dy) = 0 with smallest z.
struct CriticalData {
    double zeta = 0;
    double theta = 0;                        // = tau[0]
    std::vector<double> tau;                 // one value per symbol
    std::vector<std::vector<double>> kmat;   // Jacobian at the solution
    std::vector<double> frob_vec;            // top eigenvector, first entry 1
    double tol_achieved = 0;
};

// Scalars that parameterize the accelerated sampler.
struct DerivedConstants {
    double a0 = 0;          // weight share of the minimal piece class
    double aneq = 0;        // weight share of all other pieces
    double vbar = 0;        // mean atoms per piece at the joint solution
    double eps = 0;         // sqrt(3 aneq / vbar), tilt amplitude
    double kappa_star = 0;  // aneq / vbar
    double mu_star = 0;     // a0 / vbar
    double reach_prob = 0;  // asymptotic landing probability of the walk
};

// Values of the non-target symbols with the target fixed at u, plus the
// resulting target value.
struct ReducedSolution {
    std::vector<double> y;  // symbols 1..m
    double a = 0;           // target symbol value at (z, u, y)
};

CriticalData solve_characteristic(const CombinatorialSpec& spec,
                                  double tol = 1e-12);

ReducedSolution solve_reduced_system(const CombinatorialSpec& spec, double z,
                                     double u, double tol = 1e-14);

DerivedConstants derived_constants(const CombinatorialSpec& spec,
                                   const CriticalData& crit,
                                   const SubtreeCatalog& catalog);

// Log of the piece-weight ratio between the tilted point
// (zeta e^x, theta e^{v0 x}) and the joint solution; 0 at x = 0.
double drift_function_f(const CombinatorialSpec& spec, const CriticalData& crit,
                        const SubtreeCatalog& catalog, double x);

// Largest eigenvalue and positive eigenvector of a nonnegative matrix by
// power iteration on M + I (the shift handles periodic patterns).
std::pair<double, std::vector<double>> frobenius_eigenvalue(
    const std::vector<std::vector<double>>& m, double tol = 1e-12);

}  // namespace cfboltz
