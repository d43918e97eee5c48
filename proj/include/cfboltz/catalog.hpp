#pragma once

#include <cstdint>
#include <vector>

#include "cfboltz/random.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/tree.hpp"

namespace cfboltz {

// One walk step: a piece with v atom leaves moves the ordinate by
// dl = ell - 1 and advances the diagonal index by u_tilde = v + v0*dl.
struct StepVec {
    std::int64_t v;
    std::int64_t dl;
    bool operator==(const StepVec&) const = default;
};

// The finite data attached to the decomposition pieces of a spec.
struct SubtreeCatalog {
    std::uint64_t v0 = 0;          // least piece size with no target leaves
    mpq_class t0;                  // total weight of that class
    std::vector<Subtree> base_trees;     // all pieces with v = v0, ell = 0
    std::vector<mpq_class> base_weights; // their weights
    DiscreteDist base_dist;              // prepared sampler over base_trees
    std::vector<StepVec> support_sample; // observed small steps (diagnostic)
};

// Computes v0 by a shortest-derivation fixpoint, enumerates the base
// class exhaustively, and probes small piece sizes for the support
// sample.  Throws NoExcursion if no derivation of the target avoids
// target-symbol leaves, CapExceeded if the base class is larger than cap.
SubtreeCatalog compute_catalog(const CombinatorialSpec& spec,
                               std::uint64_t cap = 1'000'000);

}  // namespace cfboltz
