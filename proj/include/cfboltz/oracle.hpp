#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "cfboltz/random.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/tree.hpp"

namespace cfboltz {

// Exact weighted counting and exact recursive sampling, independent of the
// accelerated pipeline. Series are extended lazily and kept as exact
// rationals; same-size dependencies through pure renames are resolved by
// iterating the nilpotent linear part.
class ExactOracle {
public:
    explicit ExactOracle(const CombinatorialSpec& spec);

    // Total weight of symbol `sym` objects with exactly n atoms.
    const mpq_class& count(std::size_t sym, std::uint64_t n);
    const mpq_class& count_target(std::uint64_t n) { return count(0, n); }

    // Draws a target-symbol object of size n with probability proportional
    // to its weight. Throws EmptySizeClass if the size class has weight 0.
    ColoredTree sample(std::uint64_t n, BitSource& bits);

    // All target-symbol objects of size n; throws CapExceeded beyond cap.
    std::vector<ColoredTree> enumerate(std::uint64_t n, std::uint64_t cap);

    const CombinatorialSpec& spec() const { return spec_; }

private:
    struct MonoInfo {
        std::vector<std::size_t> parts;  // symbol children, canonical order
        bool rename;                     // no atoms, single symbol factor
        // suffix[r][s]: weight of filling parts r.. with total size s
        std::vector<std::vector<mpq_class>> suffix;
    };

    void extend_to(std::uint64_t n);
    const mpq_class& suffix_at(std::size_t a, std::size_t mi, std::size_t r,
                               std::uint64_t s);
    void sample_node(std::size_t a, std::uint64_t n, BitSource& bits,
                     std::vector<TreeNode>& out);
    void enum_nodes(std::size_t a, std::uint64_t n, std::uint64_t cap,
                    std::uint64_t& produced,
                    std::vector<std::vector<TreeNode>>& out);

    CombinatorialSpec spec_;
    std::vector<std::vector<mpq_class>> series_;     // per symbol, index = size
    std::vector<std::vector<MonoInfo>> mono_info_;   // mirrors productions
    std::uint64_t max_n_ = 0;
};

}  // namespace cfboltz
