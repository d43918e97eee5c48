#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfboltz/spec.hpp"

namespace cfboltz {

// One expanded node: which symbol it carries and which of that symbol's
// monomials it was derived with.
struct TreeNode {
    std::uint32_t color;
    std::uint32_t mono;
    bool operator==(const TreeNode&) const = default;
};

// Child order is canonical everywhere: first the z_exp atom leaves, then
// the symbol children grouped by symbol index in increasing order.

// A decomposition piece: a tree rooted at the target symbol in which
// every target-symbol child is kept as an unexpanded leaf.  nodes is the
// preorder list of expanded nodes.
struct Subtree {
    std::vector<TreeNode> nodes;
    std::uint64_t v = 0;    // atom leaves
    std::uint64_t ell = 0;  // target-symbol leaves
    double log_w = 0;       // sum of log coefficients
    bool operator==(const Subtree& o) const { return nodes == o.nodes; }
};

// A fully expanded structure of the target class; nodes in preorder.
struct ColoredTree {
    std::vector<TreeNode> nodes;
    std::uint64_t v = 0;
    double log_w = 0;
    bool operator==(const ColoredTree& o) const { return nodes == o.nodes; }
};

// Exact weight: product of monomial coefficients over all nodes.
mpq_class piece_weight(const CombinatorialSpec& spec, const Subtree& t);
mpq_class tree_weight(const CombinatorialSpec& spec, const ColoredTree& t);

// Compact text form, e.g. 0(0(z)0(z)); target-symbol leaves of a piece
// print as "A" regardless of the symbol's declared name.
std::string to_paren(const CombinatorialSpec& spec, std::span<const TreeNode> nodes,
                     bool piece);
std::string to_paren(const CombinatorialSpec& spec, const ColoredTree& t);
std::string to_paren(const CombinatorialSpec& spec, const Subtree& t);

// Single-line JSON object {"color":c,"children":[...]} with atom leaves
// {"leaf":"z"} and unexpanded target leaves {"leaf":"A"}.
std::string to_json(const CombinatorialSpec& spec, std::span<const TreeNode> nodes,
                    bool piece);
std::string to_json(const CombinatorialSpec& spec, const ColoredTree& t);
std::string to_json(const CombinatorialSpec& spec, const Subtree& t);

// Recompute leaf counts from the node list and verify the preorder is
// well-formed (arities match); throws MalformedExcursion otherwise.
void recount(const CombinatorialSpec& spec, std::span<const TreeNode> nodes, bool piece,
             std::uint64_t* v_out, std::uint64_t* ell_out);

}  // namespace cfboltz
