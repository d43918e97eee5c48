#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cfboltz/catalog.hpp"
#include "cfboltz/critical.hpp"
#include "cfboltz/random.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/tree.hpp"

namespace cfboltz {

// One tilted parameter point of the proposal mixture.
struct MixturePoint {
    double pi = 1;   // selection probability
    double xi = 0;   // log-shift of z
    double eta = 0;  // log-shift of u
    double z = 0;
    double u = 0;
    std::vector<double> y;  // non-target symbol values at (z, u)
    double a = 0;           // target value at (z, u)
};

struct MixtureMeasure {
    std::vector<MixturePoint> points;
    DiscreteDist point_dist;       // prepared draw over points by pi
    std::vector<double> pi_tilde;  // pi_a e^{-f(xi_a)}, equal across points
    std::uint64_t n_prime = 0;
    double x = 0;          // plus tilt eps/sqrt(n'); minus tilt in points[1]
    double cosh_norm = 1;  // (e^{f(x+)} + e^{f(x-)})/2 = cosh(f(x+)) >= 1
};

// Per mixture point and color: monomial choice probabilities for the
// rewriting process, renormalized to sum exactly 1.
struct OffspringTable {
    std::vector<std::vector<DiscreteDist>> dist;            // [point][color]
    std::vector<std::vector<std::vector<double>>> prob;     // [point][color][mono]
    std::vector<std::vector<double>> log_coeff;             // [color][mono]
};

// Balanced two-point mixture: plus tilt eps/sqrt(n-v0), minus tilt solved so
// the two log-shifts cancel exactly. Throws SizeTooSmall when the plus point
// leaves the convergence region of the reduced system.
MixtureMeasure make_mixture(const CombinatorialSpec& spec,
                            const CriticalData& crit,
                            const DerivedConstants& consts,
                            const SubtreeCatalog& catalog, std::uint64_t n);

// Degenerate single-point measure at the joint solution itself (zero tilt).
MixtureMeasure critical_mixture(const CombinatorialSpec& spec,
                                const CriticalData& crit);

OffspringTable build_offspring_table(const CombinatorialSpec& spec,
                                     const MixtureMeasure& mix);

// Weight-proportional draw from the finite minimal piece class.
Subtree sample_subtree_mu0(const SubtreeCatalog& catalog, BitSource& bits);

// Draw from the mixture, conditioned away from the minimal class by
// resampling with the same point. Returns the piece and the point index.
std::pair<Subtree, std::size_t> sample_subtree_neq(
    const CombinatorialSpec& spec, const SubtreeCatalog& catalog,
    const MixtureMeasure& mix, const OffspringTable& tables, BitSource& bits,
    std::uint64_t node_cap = 1'000'000'000);

}  // namespace cfboltz
