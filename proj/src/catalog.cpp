#include "cfboltz/catalog.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

// Least atom-leaf count of a derivation of each symbol that never leaves
// the target symbol unexpanded (monomials with a target factor are banned).
// Bellman-style fixpoint; kInf marks symbols with no such derivation.
std::vector<std::uint64_t> min_free_size(const CombinatorialSpec& spec) {
    const std::size_t n = spec.count();
    std::vector<std::uint64_t> minv(n, kInf);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < n; ++a) {
            for (const auto& mono : spec.productions[a]) {
                // target factors are only allowed as leaves, never inside
                if (mono.sym_exp[0] > 0) continue;
                std::uint64_t total = mono.z_exp;
                bool ok = true;
                for (std::size_t b = 1; b < n; ++b) {
                    for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r) {
                        if (minv[b] == kInf) {
                            ok = false;
                            break;
                        }
                        total += minv[b];
                    }
                    if (!ok) break;
                }
                if (ok && total < minv[a]) {
                    minv[a] = total;
                    changed = true;
                }
            }
        }
    }
    return minv;
}

// Truncated bivariate series: coeff[v][l] = total weight of pieces with v
// atom leaves and l target leaves, for the inner (non-target) symbols.
using Series = std::vector<std::vector<mpq_class>>;

Series zero_series(std::size_t vmax, std::size_t lmax) {
    return Series(vmax + 1, std::vector<mpq_class>(lmax + 1, mpq_class(0)));
}

void mul_acc(const Series& p, const Series& q, Series& out) {
    const std::size_t vmax = out.size() - 1, lmax = out[0].size() - 1;
    for (std::size_t v1 = 0; v1 <= vmax; ++v1)
        for (std::size_t l1 = 0; l1 <= lmax; ++l1) {
            if (p[v1][l1] == 0) continue;
            for (std::size_t v2 = 0; v1 + v2 <= vmax; ++v2)
                for (std::size_t l2 = 0; l1 + l2 <= lmax; ++l2) {
                    if (q[v2][l2] == 0) continue;
                    out[v1 + v2][l1 + l2] += p[v1][l1] * q[v2][l2];
                }
        }
}

// Applies one production to the current inner series; u marks target leaves.
Series apply_production(const CombinatorialSpec& spec, std::size_t a,
                        const std::vector<Series>& inner, std::size_t vmax,
                        std::size_t lmax) {
    Series out = zero_series(vmax, lmax);
    for (const auto& mono : spec.productions[a]) {
        if (mono.z_exp > vmax || mono.sym_exp[0] > lmax) continue;
        Series term = zero_series(vmax, lmax);
        term[mono.z_exp][mono.sym_exp[0]] = mono.coeff;
        for (std::size_t b = 1; b < spec.count(); ++b)
            for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r) {
                Series next = zero_series(vmax, lmax);
                mul_acc(term, inner[b], next);
                term = std::move(next);
            }
        for (std::size_t v = 0; v <= vmax; ++v)
            for (std::size_t l = 0; l <= lmax; ++l) out[v][l] += term[v][l];
    }
    return out;
}

// Exhaustive enumeration of derivations with no target leaves.
struct FreeEnumerator {
    const CombinatorialSpec& spec;
    std::uint64_t cap;
    std::uint64_t produced = 0;
    std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::vector<TreeNode>>>
        memo;

    std::vector<std::vector<TreeNode>> compositions(
        const std::vector<std::size_t>& parts, std::size_t idx, std::uint64_t rem) {
        if (idx == parts.size())
            return rem == 0 ? std::vector<std::vector<TreeNode>>{{}}
                            : std::vector<std::vector<TreeNode>>{};
        std::vector<std::vector<TreeNode>> out;
        std::uint64_t left = parts.size() - idx - 1;  // later parts need >= 1 each
        for (std::uint64_t t = 1; t + left <= rem; ++t) {
            auto heads = enumerate(parts[idx], t);
            if (heads.empty()) continue;
            auto tails = compositions(parts, idx + 1, rem - t);
            for (const auto& h : heads)
                for (const auto& rest : tails) {
                    std::vector<TreeNode> frag = h;
                    frag.insert(frag.end(), rest.begin(), rest.end());
                    out.push_back(std::move(frag));
                    if (++produced > cap) throw CapExceeded("piece enumeration cap");
                }
        }
        return out;
    }

    // All no-target-leaf derivations of symbol a with exactly s atom leaves.
    std::vector<std::vector<TreeNode>> enumerate(std::size_t a, std::uint64_t s) {
        auto key = std::make_pair(a, s);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        memo[key] = {};  // guards rename cycles; nilpotent specs never recurse here
        std::vector<std::vector<TreeNode>> out;
        for (std::uint32_t mi = 0; mi < spec.productions[a].size(); ++mi) {
            const Monomial& mono = spec.productions[a][mi];
            if (mono.sym_exp[0] > 0 || mono.z_exp > s) continue;
            std::vector<std::size_t> parts;
            for (std::size_t b = 1; b < spec.count(); ++b)
                for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r) parts.push_back(b);
            auto bodies = compositions(parts, 0, s - mono.z_exp);
            for (auto& body : bodies) {
                std::vector<TreeNode> frag;
                frag.reserve(body.size() + 1);
                frag.push_back({static_cast<std::uint32_t>(a), mi});
                frag.insert(frag.end(), body.begin(), body.end());
                out.push_back(std::move(frag));
            }
        }
        memo[key] = out;
        return out;
    }
};

}  // namespace

SubtreeCatalog compute_catalog(const CombinatorialSpec& spec, std::uint64_t cap) {
    SubtreeCatalog cat;
    auto minv = min_free_size(spec);

    // v0 from the target symbol's own productions (its children may not use
    // the target again except as leaves, which the base class forbids).
    std::uint64_t v0 = kInf;
    for (const auto& mono : spec.productions[0]) {
        if (mono.sym_exp[0] > 0) continue;
        std::uint64_t total = mono.z_exp;
        bool ok = true;
        for (std::size_t b = 1; b < spec.count(); ++b)
            for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r) {
                if (minv[b] == kInf) {
                    ok = false;
                    break;
                }
                total += minv[b];
            }
        if (ok && total < v0) v0 = total;
    }
    if (v0 == kInf) throw NoExcursion();
    if (v0 == 0) throw Error("empty piece: spec admits a zero-atom derivation");
    cat.v0 = v0;

    // Base class: every piece with v0 atom leaves and no target leaves.
    FreeEnumerator en{spec, cap};
    auto frags = en.enumerate(0, v0);
    if (frags.empty()) throw NoExcursion();
    cat.t0 = 0;
    for (auto& frag : frags) {
        Subtree t;
        t.nodes = std::move(frag);
        recount(spec, t.nodes, true, &t.v, &t.ell);
        if (t.v != v0 || t.ell != 0) throw Error("base enumeration inconsistency");
        mpq_class w = piece_weight(spec, t);
        t.log_w = std::log(w.get_d());
        cat.base_weights.push_back(w);
        cat.t0 += w;
        cat.base_trees.push_back(std::move(t));
    }
    cat.base_dist = DiscreteDist(std::span<const mpq_class>(cat.base_weights));

    // Support probe: which small (v, ell) classes are inhabited.
    const std::size_t vmax = static_cast<std::size_t>(v0 + 3), lmax = 3;
    std::vector<Series> inner(spec.count(), zero_series(vmax, lmax));
    std::size_t rounds = (vmax + lmax + 2) * (spec.count() + 2) + 4;
    for (std::size_t r = 0; r < rounds; ++r) {
        bool changed = false;
        for (std::size_t b = 1; b < spec.count(); ++b) {
            Series next = apply_production(spec, b, inner, vmax, lmax);
            if (next != inner[b]) {
                inner[b] = std::move(next);
                changed = true;
            }
        }
        if (!changed) break;
    }
    Series root = apply_production(spec, 0, inner, vmax, lmax);
    for (std::size_t v = 0; v <= vmax; ++v)
        for (std::size_t l = 0; l <= lmax; ++l)
            if (root[v][l] > 0)
                cat.support_sample.push_back(
                    {static_cast<std::int64_t>(v), static_cast<std::int64_t>(l) - 1});
    if (root[v0][0] != cat.t0) throw Error("base weight cross-check failed");

    return cat;
}

}  // namespace cfboltz
