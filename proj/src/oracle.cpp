#include "cfboltz/oracle.hpp"

#include <cmath>

#include "cfboltz/errors.hpp"

namespace cfboltz {

ExactOracle::ExactOracle(const CombinatorialSpec& spec) : spec_(spec) {
    mono_info_.resize(spec_.count());
    series_.resize(spec_.count());
    for (std::size_t a = 0; a < spec_.count(); ++a) {
        series_[a].push_back(mpq_class(0));  // no size-0 objects
        for (const auto& mono : spec_.productions[a]) {
            MonoInfo info;
            for (std::size_t b = 0; b < spec_.count(); ++b)
                for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r)
                    info.parts.push_back(b);
            info.rename = mono.z_exp == 0 && info.parts.size() == 1;
            info.suffix.resize(info.parts.size() + 1);
            mono_info_[a].push_back(std::move(info));
        }
    }
}

const mpq_class& ExactOracle::suffix_at(std::size_t a, std::size_t mi,
                                        std::size_t r, std::uint64_t s) {
    MonoInfo& info = mono_info_[a][mi];
    auto& arr = info.suffix[r];
    const std::size_t d = info.parts.size();
    while (arr.size() <= s) {
        const std::uint64_t w = arr.size();
        mpq_class val(0);
        if (r == d) {
            if (w == 0) val = 1;
        } else {
            // later parts need >= 1 atom each, so the head part is capped;
            // this also keeps every series read strictly below the size
            // currently being extended
            const std::uint64_t tail = d - r - 1;
            for (std::uint64_t u = 1; u + tail <= w; ++u) {
                const mpq_class& head = series_[info.parts[r]][u];
                if (head == 0) continue;
                val += head * suffix_at(a, mi, r + 1, w - u);
            }
        }
        arr.push_back(std::move(val));
    }
    return arr[s];
}

void ExactOracle::extend_to(std::uint64_t n) {
    const std::size_t nsym = spec_.count();
    for (std::uint64_t t = max_n_ + 1; t <= n; ++t) {
        std::vector<mpq_class> b(nsym, mpq_class(0));
        for (std::size_t a = 0; a < nsym; ++a)
            for (std::size_t mi = 0; mi < spec_.productions[a].size(); ++mi) {
                const Monomial& mono = spec_.productions[a][mi];
                if (mono_info_[a][mi].rename || mono.z_exp > t) continue;
                const mpq_class& s = suffix_at(a, mi, 0, t - mono.z_exp);
                if (s != 0) b[a] += mono.coeff * s;
            }
        // renames form a nilpotent linear map, so iterating x <- b + Lx
        // one step per symbol reaches the exact solution
        std::vector<mpq_class> x = b;
        for (std::size_t it = 0; it < nsym; ++it) {
            std::vector<mpq_class> nx = b;
            for (std::size_t a = 0; a < nsym; ++a)
                for (std::size_t mi = 0; mi < spec_.productions[a].size(); ++mi)
                    if (mono_info_[a][mi].rename)
                        nx[a] += spec_.productions[a][mi].coeff *
                                 x[mono_info_[a][mi].parts[0]];
            x = std::move(nx);
        }
        for (std::size_t a = 0; a < nsym; ++a)
            series_[a].push_back(std::move(x[a]));
        max_n_ = t;
    }
}

const mpq_class& ExactOracle::count(std::size_t sym, std::uint64_t n) {
    extend_to(n);
    return series_[sym][n];
}

void ExactOracle::sample_node(std::size_t a, std::uint64_t n, BitSource& bits,
                              std::vector<TreeNode>& out) {
    const auto& prods = spec_.productions[a];
    std::vector<mpq_class> w(prods.size(), mpq_class(0));
    for (std::size_t mi = 0; mi < prods.size(); ++mi) {
        if (prods[mi].z_exp > n) continue;
        w[mi] = prods[mi].coeff * suffix_at(a, mi, 0, n - prods[mi].z_exp);
    }
    const std::size_t mi = discrete(std::span<const mpq_class>(w), bits);
    out.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(mi)});
    const MonoInfo& info = mono_info_[a][mi];
    std::uint64_t rem = n - prods[mi].z_exp;
    for (std::size_t r = 0; r < info.parts.size(); ++r) {
        const std::uint64_t tail = info.parts.size() - 1 - r;
        std::vector<mpq_class> wt;
        for (std::uint64_t t = 1; t + tail <= rem; ++t)
            wt.push_back(series_[info.parts[r]][t] *
                         suffix_at(a, mi, r + 1, rem - t));
        const std::uint64_t t = 1 + discrete(std::span<const mpq_class>(wt), bits);
        sample_node(info.parts[r], t, bits, out);
        rem -= t;
    }
}

ColoredTree ExactOracle::sample(std::uint64_t n, BitSource& bits) {
    extend_to(n);
    if (series_[0][n] == 0) throw EmptySizeClass(n);
    ColoredTree t;
    sample_node(0, n, bits, t.nodes);
    t.v = n;
    t.log_w = std::log(tree_weight(spec_, t).get_d());
    return t;
}

void ExactOracle::enum_nodes(std::size_t a, std::uint64_t n, std::uint64_t cap,
                             std::uint64_t& produced,
                             std::vector<std::vector<TreeNode>>& out) {
    const auto& prods = spec_.productions[a];
    for (std::size_t mi = 0; mi < prods.size(); ++mi) {
        if (prods[mi].z_exp > n) continue;
        if (suffix_at(a, mi, 0, n - prods[mi].z_exp) == 0) continue;
        const MonoInfo& info = mono_info_[a][mi];
        // partial: fragments for parts 0..r-1 with their remaining budget
        std::vector<std::pair<std::vector<TreeNode>, std::uint64_t>> partial;
        partial.emplace_back(std::vector<TreeNode>{{static_cast<std::uint32_t>(a),
                                                    static_cast<std::uint32_t>(mi)}},
                             n - prods[mi].z_exp);
        for (std::size_t r = 0; r < info.parts.size(); ++r) {
            const std::uint64_t tail = info.parts.size() - 1 - r;
            std::vector<std::pair<std::vector<TreeNode>, std::uint64_t>> next;
            for (const auto& [frag, rem] : partial)
                for (std::uint64_t t = 1; t + tail <= rem; ++t) {
                    if (series_[info.parts[r]][t] == 0) continue;
                    if (suffix_at(a, mi, r + 1, rem - t) == 0) continue;
                    std::vector<std::vector<TreeNode>> subs;
                    enum_nodes(info.parts[r], t, cap, produced, subs);
                    for (const auto& sub : subs) {
                        auto ext = frag;
                        ext.insert(ext.end(), sub.begin(), sub.end());
                        next.emplace_back(std::move(ext), rem - t);
                    }
                }
            partial = std::move(next);
        }
        for (auto& [frag, rem] : partial) {
            if (rem != 0) continue;
            out.push_back(std::move(frag));
            if (++produced > cap) throw CapExceeded("enumeration cap");
        }
    }
}

std::vector<ColoredTree> ExactOracle::enumerate(std::uint64_t n, std::uint64_t cap) {
    extend_to(n);
    std::vector<std::vector<TreeNode>> frags;
    std::uint64_t produced = 0;
    enum_nodes(0, n, cap, produced, frags);
    std::vector<ColoredTree> out;
    out.reserve(frags.size());
    for (auto& frag : frags) {
        ColoredTree t;
        t.nodes = std::move(frag);
        t.v = n;
        t.log_w = std::log(tree_weight(spec_, t).get_d());
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace cfboltz
