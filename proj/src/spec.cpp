#include "cfboltz/spec.hpp"

#include <queue>

namespace cfboltz {

const char* issue_name(IssueKind k) {
    switch (k) {
        case IssueKind::EmptyProduction: return "EmptyProduction";
        case IssueKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
        case IssueKind::EpsilonMonomial: return "EpsilonMonomial";
        case IssueKind::LinearPartNotNilpotent: return "LinearPartNotNilpotent";
        case IssueKind::NotStronglyConnected: return "NotStronglyConnected";
    }
    return "?";
}

namespace {

std::vector<bool> reachable_from(const CombinatorialSpec& spec, std::size_t start) {
    std::vector<bool> seen(spec.count(), false);
    std::queue<std::size_t> q;
    seen[start] = true;
    q.push(start);
    while (!q.empty()) {
        std::size_t a = q.front();
        q.pop();
        for (const auto& mono : spec.productions[a])
            for (std::size_t b = 0; b < mono.sym_exp.size(); ++b)
                if (mono.sym_exp[b] > 0 && !seen[b]) {
                    seen[b] = true;
                    q.push(b);
                }
    }
    return seen;
}

}  // namespace

std::vector<ValidationIssue> validate_spec(const CombinatorialSpec& spec) {
    std::vector<ValidationIssue> out;
    const std::size_t n = spec.count();

    for (std::size_t a = 0; a < n; ++a) {
        if (spec.productions[a].empty())
            out.push_back({IssueKind::EmptyProduction, spec.symbols[a]});
        for (const auto& mono : spec.productions[a]) {
            if (mono.coeff <= 0)
                out.push_back({IssueKind::NonPositiveCoefficient,
                               spec.symbols[a] + ": " + mono.coeff.get_str()});
            if (mono.z_exp == 0 && mono.sym_degree() == 0)
                out.push_back({IssueKind::EpsilonMonomial, spec.symbols[a]});
        }
    }

    // Linear part L[a][b]: coefficient of the bare monomial y_b in Phi_a.
    // Nilpotency (L^n = 0) is equivalent to the pure-rename digraph being
    // acyclic, which we check by Kahn peeling.
    {
        std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
        std::vector<int> indeg(n, 0);
        for (std::size_t a = 0; a < n; ++a)
            for (const auto& mono : spec.productions[a])
                if (mono.z_exp == 0 && mono.sym_degree() == 1)
                    for (std::size_t b = 0; b < n; ++b)
                        if (mono.sym_exp[b] == 1 && !edge[a][b]) {
                            edge[a][b] = true;
                            ++indeg[b];
                        }
        std::queue<std::size_t> q;
        for (std::size_t v = 0; v < n; ++v)
            if (indeg[v] == 0) q.push(v);
        std::size_t peeled = 0;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            ++peeled;
            for (std::size_t w = 0; w < n; ++w)
                if (edge[v][w] && --indeg[w] == 0) q.push(w);
        }
        if (peeled != n)
            out.push_back({IssueKind::LinearPartNotNilpotent,
                           "pure-rename cycle among symbols"});
    }

    // Strong connectivity over the symbols reachable from the target.
    {
        std::vector<bool> reach = reachable_from(spec, 0);
        for (std::size_t a = 0; a < n; ++a) {
            if (!reach[a]) continue;
            std::vector<bool> back = reachable_from(spec, a);
            if (!back[0]) {
                out.push_back({IssueKind::NotStronglyConnected, spec.symbols[a]});
                break;
            }
        }
    }

    return out;
}

}  // namespace cfboltz
