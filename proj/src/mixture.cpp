#include "cfboltz/mixture.hpp"

#include <cmath>
#include <span>

#include "cfboltz/errors.hpp"

namespace cfboltz {

MixtureMeasure make_mixture(const CombinatorialSpec& spec,
                            const CriticalData& crit,
                            const DerivedConstants& consts,
                            const SubtreeCatalog& catalog, std::uint64_t n) {
    if (n <= catalog.v0) throw SizeTooSmall(n);
    MixtureMeasure mix;
    mix.n_prime = n - catalog.v0;
    mix.x = consts.eps / std::sqrt(static_cast<double>(mix.n_prime));
    const double v0 = static_cast<double>(catalog.v0);

    double fp, fm;
    MixturePoint plus, minus;
    plus.xi = mix.x;
    try {
        fp = drift_function_f(spec, crit, catalog, plus.xi);
        // Balance the log-shifts: the minus tilt is the root of
        // f(t) = -f(x), not -x itself. f is increasing with f(0) = 0 and
        // convex, so the root sits at or left of -x; every t < 0 keeps both
        // parameters strictly inside the convergence region. The balance
        // makes the normalizer equal cosh(f(x)) instead of carrying an
        // extra e^{Var * x^2 / 2} asymmetry penalty per step.
        double lo = -mix.x;
        double hi = 0;
        while (drift_function_f(spec, crit, catalog, lo) > -fp) {
            hi = lo;
            lo *= 2;
        }
        for (int it = 0; it < 100 && hi - lo > 1e-14 * -lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (drift_function_f(spec, crit, catalog, mid) > -fp)
                hi = mid;
            else
                lo = mid;
        }
        minus.xi = 0.5 * (lo + hi);
        fm = drift_function_f(spec, crit, catalog, minus.xi);
        for (MixturePoint* p : {&plus, &minus}) {
            p->eta = v0 * p->xi;
            p->z = crit.zeta * std::exp(p->xi);
            p->u = crit.theta * std::exp(p->eta);
            ReducedSolution sol = solve_reduced_system(spec, p->z, p->u);
            p->y = std::move(sol.y);
            p->a = sol.a;
        }
    } catch (const OutsideSubcriticalBall&) {
        throw SizeTooSmall(n);
    } catch (const NoConvergence&) {
        throw SizeTooSmall(n);
    }
    // balanced: pi+ + pi- = 1 and pi+ e^{-f(x)} = pi- e^{-f(-x)}
    const double ep = std::exp(fp), em = std::exp(fm);
    plus.pi = ep / (ep + em);
    minus.pi = em / (ep + em);
    mix.pi_tilde = {plus.pi * std::exp(-fp), minus.pi * std::exp(-fm)};
    mix.cosh_norm = (ep + em) / 2;
    const double pis[2] = {plus.pi, minus.pi};
    mix.point_dist = DiscreteDist(std::span<const double>(pis));
    mix.points = {std::move(plus), std::move(minus)};
    return mix;
}

MixtureMeasure critical_mixture(const CombinatorialSpec& spec,
                                const CriticalData& crit) {
    MixtureMeasure mix;
    MixturePoint p;
    p.pi = 1;
    p.z = crit.zeta;
    p.u = crit.theta;
    ReducedSolution sol = solve_reduced_system(spec, p.z, p.u);
    p.y = std::move(sol.y);
    p.a = sol.a;
    mix.pi_tilde = {1.0};
    const double one[1] = {1.0};
    mix.point_dist = DiscreteDist(std::span<const double>(one));
    mix.points = {std::move(p)};
    return mix;
}

OffspringTable build_offspring_table(const CombinatorialSpec& spec,
                                     const MixtureMeasure& mix) {
    OffspringTable tab;
    const std::size_t nsym = spec.count();
    tab.log_coeff.resize(nsym);
    for (std::size_t c = 0; c < nsym; ++c)
        for (const auto& mono : spec.productions[c])
            tab.log_coeff[c].push_back(std::log(mono.coeff.get_d()));

    tab.dist.resize(mix.points.size());
    tab.prob.resize(mix.points.size());
    for (std::size_t a = 0; a < mix.points.size(); ++a) {
        const MixturePoint& pt = mix.points[a];
        tab.dist[a].resize(nsym);
        tab.prob[a].resize(nsym);
        for (std::size_t c = 0; c < nsym; ++c) {
            const auto& prods = spec.productions[c];
            std::vector<double> w(prods.size());
            double total = 0;
            for (std::size_t mi = 0; mi < prods.size(); ++mi) {
                const Monomial& mono = prods[mi];
                double v = mono.coeff.get_d() *
                           std::pow(pt.z, static_cast<double>(mono.z_exp)) *
                           std::pow(pt.u, static_cast<double>(mono.sym_exp[0]));
                for (std::size_t b = 1; b < nsym; ++b)
                    v *= std::pow(pt.y[b - 1],
                                  static_cast<double>(mono.sym_exp[b]));
                w[mi] = v;
                total += v;
            }
            const double expected = c == 0 ? pt.a : pt.y[c - 1];
            if (std::abs(total - expected) > 1e-9 * expected)
                throw InvariantBreach("offspring weights do not sum to the symbol value");
            std::size_t largest = 0;
            double rest = 0;
            for (std::size_t mi = 0; mi < w.size(); ++mi) {
                w[mi] /= total;
                if (w[mi] > w[largest]) largest = mi;
            }
            for (std::size_t mi = 0; mi < w.size(); ++mi)
                if (mi != largest) rest += w[mi];
            w[largest] = 1 - rest;  // sums to exactly 1
            tab.prob[a][c] = w;
            tab.dist[a][c] = DiscreteDist(std::span<const double>(w));
        }
    }
    return tab;
}

Subtree sample_subtree_mu0(const SubtreeCatalog& catalog, BitSource& bits) {
    return catalog.base_trees[catalog.base_dist.sample(bits)];
}

namespace {

Subtree draw_piece(const CombinatorialSpec& spec, const OffspringTable& tables,
                   std::size_t point, BitSource& bits, std::uint64_t cap) {
    Subtree t;
    // scratch kept across calls; draws dominate the walk's inner loop
    static thread_local std::vector<std::uint32_t> todo;
    todo.assign(1, 0);
    std::uint64_t count = 0;
    while (!todo.empty()) {
        const std::uint32_t c = todo.back();
        todo.pop_back();
        if (++count > cap) throw DepthRunaway();
        const std::size_t mi = tables.dist[point][c].sample(bits);
        t.nodes.push_back({c, static_cast<std::uint32_t>(mi)});
        const Monomial& mono = spec.productions[c][mi];
        t.v += mono.z_exp;
        t.ell += mono.sym_exp[0];
        t.log_w += tables.log_coeff[c][mi];
        // reverse push so children pop in canonical ascending order
        for (std::size_t b = spec.count(); b-- > 1;)
            for (std::uint32_t r = 0; r < mono.sym_exp[b]; ++r)
                todo.push_back(static_cast<std::uint32_t>(b));
    }
    return t;
}

}  // namespace

std::pair<Subtree, std::size_t> sample_subtree_neq(
    const CombinatorialSpec& spec, const SubtreeCatalog& catalog,
    const MixtureMeasure& mix, const OffspringTable& tables, BitSource& bits,
    std::uint64_t node_cap) {
    const std::size_t a = mix.point_dist.sample(bits);
    for (;;) {
        Subtree t = draw_piece(spec, tables, a, bits, node_cap);
        // the minimal class is exactly {v = v0, no target leaves}
        if (t.v == catalog.v0 && t.ell == 0) continue;
        return {std::move(t), a};
    }
}

}  // namespace cfboltz
