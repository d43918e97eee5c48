#include "cfboltz/shuffle.hpp"

#include <cmath>

#include <gmpxx.h>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

// The string is uniform for ANY Bernoulli parameter, so the stream may use
// a nearby dyadic, which terminates the lazy comparison in <= d bits.
mpq_class stream_parameter(std::uint64_t k, std::uint64_t n) {
    mpq_class beta(static_cast<unsigned long>(k), static_cast<unsigned long>(n));
    beta.canonicalize();
    if (n < 3) return beta;
    const double thresh =
        1.0 / (4.0 * std::sqrt(static_cast<double>(n)) *
               std::log(static_cast<double>(n)));
    const double bd = static_cast<double>(k) / static_cast<double>(n);
    for (int d = 0; d <= 16; ++d) {
        const double scale = static_cast<double>(std::uint64_t(1) << d);
        const double a = std::nearbyint(bd * scale);
        if (std::abs(bd - a / scale) < thresh) {
            mpq_class snapped(static_cast<unsigned long>(a),
                              static_cast<unsigned long>(std::uint64_t(1) << d));
            snapped.canonicalize();
            return snapped;
        }
    }
    return beta;
}

}  // namespace

BinaryShuffle bbhl_shuffle(std::uint64_t k, std::uint64_t m, BitSource& bits) {
    const std::uint64_t n = k + m;
    BinaryShuffle out;
    out.ones = k;
    out.seq.assign(n, 0);
    if (k == 0) return out;
    if (m == 0) {
        out.seq.assign(n, 1);
        return out;
    }
    const mpq_class beta = stream_parameter(k, n);
    std::int64_t a = static_cast<std::int64_t>(k);
    std::int64_t b = static_cast<std::int64_t>(m);
    std::uint64_t i = 0;
    for (;;) {
        const bool one = bernoulli(beta, bits);
        if (one)
            --a;
        else
            --b;
        if (a < 0 || b < 0) break;  // this draw is discarded
        out.seq[i++] = one ? 1 : 0;
    }
    const std::uint8_t fill = a < 0 ? 0 : 1;
    for (std::uint64_t j = i; j < n; ++j) {
        out.seq[j] = fill;
        const std::uint64_t h = uniform_below(j + 1, bits);
        std::swap(out.seq[j], out.seq[h]);
    }
    return out;
}

std::size_t cyc(const std::vector<StepVec>& steps) {
    std::int64_t sum = 0;
    for (const StepVec& s : steps) sum += s.dl;
    if (sum != -1) throw BadEndpoint();
    std::int64_t run = 0, best = 0;
    std::size_t arg = 0;  // first index i (1-based) minimizing the prefix sum
    for (std::size_t i = 0; i < steps.size(); ++i) {
        run += steps[i].dl;
        if (arg == 0 || run < best) {
            best = run;
            arg = i + 1;
        }
    }
    return arg % steps.size();
}

ColoredTree assemble_tree(const CombinatorialSpec& spec,
                          const std::vector<Subtree>& pieces) {
    if (pieces.empty()) throw MalformedExcursion("empty piece list");
    ColoredTree t;
    std::size_t total = 0;
    for (const Subtree& p : pieces) {
        total += p.nodes.size();
        t.v += p.v;
        t.log_w += p.log_w;
    }
    t.nodes.reserve(total);
    // One pass over all nodes: a cursor per open piece; each slot suspends
    // the current piece and starts the next one.
    struct Cursor {
        std::size_t piece;
        std::size_t node = 0;
        std::uint32_t slots = 0;  // unfilled slots of the last emitted node
    };
    std::vector<Cursor> open;
    std::size_t next = 1;
    open.push_back({0});
    while (!open.empty()) {
        Cursor& c = open.back();
        const Subtree& p = pieces[c.piece];
        if (c.slots > 0) {
            --c.slots;
            if (next >= pieces.size())
                throw MalformedExcursion("unfilled slots at end of list");
            open.push_back({next++});
            continue;
        }
        if (c.node < p.nodes.size()) {
            const TreeNode& nd = p.nodes[c.node++];
            t.nodes.push_back(nd);
            c.slots = spec.productions[nd.color][nd.mono].sym_exp[0];
            continue;
        }
        open.pop_back();
    }
    if (next != pieces.size())
        throw MalformedExcursion("no pending slot for piece");
    return t;
}

std::vector<Subtree> decompose_tree(const CombinatorialSpec& spec,
                                    const ColoredTree& tree) {
    // A target node opens a piece; other nodes join the enclosing piece.
    // Pieces come out ordered by their root's preorder position, which is
    // the depth-first slot order assemble_tree consumes.
    std::vector<Subtree> pieces;
    struct Frame {
        std::size_t piece;
        std::uint32_t children;  // child nodes not yet seen
    };
    std::vector<Frame> stack;
    for (const TreeNode& node : tree.nodes) {
        std::size_t at;
        if (node.color == 0) {
            at = pieces.size();
            pieces.emplace_back();
        } else {
            if (stack.empty())
                throw MalformedExcursion("tree does not start at the target");
            at = stack.back().piece;
        }
        if (!stack.empty()) {
            if (stack.back().children == 0)
                throw MalformedExcursion("trailing nodes");
            --stack.back().children;
        }
        Subtree& p = pieces[at];
        p.nodes.push_back(node);
        const Monomial& mono = spec.productions[node.color][node.mono];
        p.v += mono.z_exp;
        p.ell += mono.sym_exp[0];
        p.log_w += std::log(mono.coeff.get_d());
        stack.push_back({at, mono.sym_degree()});
        while (!stack.empty() && stack.back().children == 0) stack.pop_back();
    }
    if (!stack.empty()) throw MalformedExcursion("truncated node list");
    return pieces;
}

}  // namespace cfboltz
