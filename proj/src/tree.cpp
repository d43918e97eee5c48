#include "cfboltz/tree.hpp"

#include <functional>
#include <sstream>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

// Drives a preorder walk, firing callbacks for node entry/exit and leaves.
// Validates that the flat node list is a single well-formed tree.
struct Walk {
    const CombinatorialSpec& spec;
    std::span<const TreeNode> nodes;
    bool piece;
    std::function<void(const TreeNode&)> enter;
    std::function<void()> exit;
    std::function<void()> z_leaf;
    std::function<void()> a_leaf;

    void run() {
        if (nodes.empty()) throw MalformedExcursion("empty node list");
        std::size_t cursor = 0;
        // Frame: z leaves left, then per-symbol child counts left.
        struct Frame {
            std::uint32_t z_left;
            std::uint32_t sym;  // current child symbol index
            std::uint32_t sym_left;
            const Monomial* mono;
        };
        std::vector<Frame> stack;
        auto open = [&](std::uint32_t expect_color) {
            if (cursor >= nodes.size()) throw MalformedExcursion("truncated node list");
            const TreeNode& nd = nodes[cursor++];
            if (nd.color != expect_color) throw MalformedExcursion("child color mismatch");
            if (nd.color >= spec.count() ||
                nd.mono >= spec.productions[nd.color].size())
                throw MalformedExcursion("node out of range");
            const Monomial& mono = spec.productions[nd.color][nd.mono];
            if (enter) enter(nd);
            stack.push_back({mono.z_exp, 0, 0, &mono});
        };
        open(nodes[0].color);
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.z_left > 0) {
                --f.z_left;
                if (z_leaf) z_leaf();
                continue;
            }
            while (f.sym_left == 0 && f.sym < spec.count()) {
                f.sym_left = f.mono->sym_exp[f.sym];
                if (f.sym_left == 0) ++f.sym;
            }
            if (f.sym >= spec.count()) {
                if (exit) exit();
                stack.pop_back();
                continue;
            }
            std::uint32_t b = f.sym;
            --f.sym_left;
            if (f.sym_left == 0) ++f.sym;
            if (piece && b == 0) {
                if (a_leaf) a_leaf();
            } else {
                open(b);
            }
        }
        if (cursor != nodes.size()) throw MalformedExcursion("trailing nodes");
    }
};

}  // namespace

mpq_class piece_weight(const CombinatorialSpec& spec, const Subtree& t) {
    mpq_class w = 1;
    for (const auto& nd : t.nodes) w *= spec.productions[nd.color][nd.mono].coeff;
    return w;
}

mpq_class tree_weight(const CombinatorialSpec& spec, const ColoredTree& t) {
    mpq_class w = 1;
    for (const auto& nd : t.nodes) w *= spec.productions[nd.color][nd.mono].coeff;
    return w;
}

std::string to_paren(const CombinatorialSpec& spec, std::span<const TreeNode> nodes,
                     bool piece) {
    std::string out;
    out.reserve(nodes.size() * 4);
    Walk w{spec, nodes, piece,
           [&](const TreeNode& nd) {
               out += std::to_string(nd.color);
               out += '(';
           },
           [&] { out += ')'; },
           [&] { out += 'z'; },
           [&] { out += 'A'; }};
    w.run();
    return out;
}

std::string to_paren(const CombinatorialSpec& spec, const ColoredTree& t) {
    return to_paren(spec, t.nodes, false);
}

std::string to_paren(const CombinatorialSpec& spec, const Subtree& t) {
    return to_paren(spec, t.nodes, true);
}

std::string to_json(const CombinatorialSpec& spec, std::span<const TreeNode> nodes,
                    bool piece) {
    std::string out;
    out.reserve(nodes.size() * 24);
    bool at_first_child = true;  // no comma needed before next element
    auto sep = [&] {
        if (!at_first_child) out += ',';
        at_first_child = false;
    };
    Walk w{spec, nodes, piece,
           [&](const TreeNode& nd) {
               sep();
               out += "{\"color\":";
               out += std::to_string(nd.color);
               out += ",\"children\":[";
               at_first_child = true;
           },
           [&] {
               out += "]}";
               at_first_child = false;
           },
           [&] {
               sep();
               out += "{\"leaf\":\"z\"}";
           },
           [&] {
               sep();
               out += "{\"leaf\":\"A\"}";
           }};
    w.run();
    return out;
}

std::string to_json(const CombinatorialSpec& spec, const ColoredTree& t) {
    return to_json(spec, t.nodes, false);
}

std::string to_json(const CombinatorialSpec& spec, const Subtree& t) {
    return to_json(spec, t.nodes, true);
}

void recount(const CombinatorialSpec& spec, std::span<const TreeNode> nodes, bool piece,
             std::uint64_t* v_out, std::uint64_t* ell_out) {
    std::uint64_t v = 0, ell = 0;
    Walk w{spec, nodes, piece, nullptr, nullptr, [&] { ++v; }, [&] { ++ell; }};
    w.run();
    if (v_out) *v_out = v;
    if (ell_out) *ell_out = ell;
}

}  // namespace cfboltz
