#pragma once

#include <cstdint>
#include <vector>

#include "cfboltz/catalog.hpp"
#include "cfboltz/random.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/tree.hpp"

namespace cfboltz {

// A 0/1 string with a fixed number of ones.
struct BinaryShuffle {
    std::vector<std::uint8_t> seq;
    std::uint64_t ones = 0;
};

// Uniform over all strings of length k+m with k ones, by a Bernoulli stream
// with credit counters plus insertion swaps for the overflow tail. Uses
// (k+m) H(k/(k+m)) + O(sqrt) expected bits.
BinaryShuffle bbhl_shuffle(std::uint64_t k, std::uint64_t m, BitSource& bits);

// The unique rotation index j making all strict-prefix ordinate sums of the
// rotated list nonnegative. Throws BadEndpoint unless ordinates sum to -1.
std::size_t cyc(const std::vector<StepVec>& steps);

// Splices pieces in excursion order into one preorder tree. Target slots
// sit right after their parent node (canonical child order puts the target
// symbol first), so each slot splices in the next unused piece depth-first.
ColoredTree assemble_tree(const CombinatorialSpec& spec,
                          const std::vector<Subtree>& pieces);

// Splits a tree back into pieces at its internal target-symbol nodes.
std::vector<Subtree> decompose_tree(const CombinatorialSpec& spec,
                                    const ColoredTree& tree);

}  // namespace cfboltz
