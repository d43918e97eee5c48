#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cfboltz/catalog.hpp"
#include "cfboltz/certmath.hpp"
#include "cfboltz/critical.hpp"
#include "cfboltz/mixture.hpp"
#include "cfboltz/random.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/tree.hpp"

namespace cfboltz {

// Precomputed certified acceptance data for one target size.  log_kn is
// chosen from an upper bound of the whole landing-configuration family, so
// the exact log ratio stays below -scan_margin; every rounding made while
// scanning is folded into scan_max before log_kn is derived from it.
struct AcceptancePlan {
    std::uint64_t n = 0;
    std::uint64_t n_prime = 0;
    double x = 0;          // plus tilt, same stored value as the mixture
    double x_minus = 0;    // balanced minus tilt, f(x_minus) = -f(x)
    double cosh_norm = 1;  // mixture normalizer, >= 1
    double a0 = 0;         // minimal-class weight share (stored double)
    double aneq = 0;       // complementary share
    double log_kn = 0;
    double kn = 1;
    double scan_max = 0;     // certified upper bound over all walk lengths
    double scan_margin = 0;  // extra separation from 0 built into log_kn
    std::uint64_t k_dagger = 0;  // argmax walk length of the scan
    double m_star = 0;           // continuous saddle partner of k_dagger
    int scan_sign_changes = 0;   // sign flips of the scan first differences
    DInterval ln_a0;
    DInterval ln_aneq;
    DInterval ln_cosh_norm;
    DInterval ln_c;  // n' * ln cosh_norm, worst-case normalizer budget
};

// Unique root m >= 0 of psi(m+k) - psi(m+1) + ln(a0) = 0, clamped at 0.
// The left side is decreasing and convex in m, so Newton lands left of the
// root after one step and then climbs monotonically.
double solve_mstar(std::uint64_t k, double a0, double tol = 1e-10);

// Full scan over walk lengths k in [1, n'], maximizing over the appended
// minimal-piece count in closed form at each k; the per-step reweight is a
// log-sum-exp of linear functions, so Jensen convexity collapses its product
// to the equal-split value. Requires the two-point mixture.
AcceptancePlan build_acceptance_plan(const DerivedConstants& consts,
                                     const MixtureMeasure& mix,
                                     std::uint64_t n);

// Certified log acceptance ratio of one landing configuration: k walk
// pieces with the given step diagonals plus m minimal pieces.  Returns
// (midpoint, half-width) of the enclosing interval; throws InvariantBreach
// if even the lower end is positive.
std::pair<double, double> log_acceptance(const AcceptancePlan& plan,
                                         const std::vector<std::int64_t>& u_tilde,
                                         std::uint64_t k, std::uint64_t m);

// Per-call diagnostics; counters only accumulate, so one struct can be
// shared across draws to aggregate.
struct BridgeStats {
    std::uint64_t restarts = 0;     // abandoned walks before the accepted one
    std::uint64_t reaches = 0;      // walks that hit the landing diagonal
    std::uint64_t escalations = 0;  // high-precision acceptance re-evaluations
    std::uint64_t k = 0;            // accepted walk length (last draw)
    std::uint64_t m = 0;            // appended minimal pieces (last draw)
};

// Everything a sampling stream needs, immutable once built; concurrent
// draws share the context and own private BitSources.
struct BridgeContext {
    CombinatorialSpec spec;
    SubtreeCatalog catalog;
    CriticalData crit;
    DerivedConstants consts;
    MixtureMeasure mix;
    OffspringTable tables;
    AcceptancePlan plan;
    bool degenerate = false;  // n == v0: zero-step walk, one minimal piece
    std::uint64_t restart_budget = 1'000'000;
};

// Throws EmptySizeClass for n < v0, SizeTooSmall when the tilted mixture
// cannot be built this close to the minimum.
BridgeContext build_bridge_context(const CombinatorialSpec& spec,
                                   std::uint64_t n);

// Draws one accepted piece list of total size n: walk to the landing
// diagonal, certified accept/reject, minimal-piece fill, balanced shuffle.
std::vector<Subtree> sample_bridge(const BridgeContext& ctx, std::uint64_t n,
                                   BitSource& bits,
                                   BridgeStats* stats = nullptr);

// sample_bridge followed by the rotation fixing the excursion start, then
// assembly into a single tree of size n.
ColoredTree sample_excursion(const BridgeContext& ctx, std::uint64_t n,
                             BitSource& bits, BridgeStats* stats = nullptr);

}  // namespace cfboltz
