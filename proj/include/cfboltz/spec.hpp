#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cfboltz {

// One production monomial: coeff * z^z_exp * prod_b symbol_b^sym_exp[b].
struct Monomial {
    mpq_class coeff;
    std::uint32_t z_exp = 0;
    std::vector<std::uint32_t> sym_exp;  // one entry per symbol

    std::uint32_t sym_degree() const {
        std::uint32_t d = 0;
        for (auto k : sym_exp) d += k;
        return d;
    }
};

// A polynomial system Y_a = Phi_a(z, Y) with nonnegative coefficients.
// Symbol 0 is the target class being sampled.
struct CombinatorialSpec {
    std::vector<std::string> symbols;
    std::vector<std::vector<Monomial>> productions;

    std::size_t count() const { return symbols.size(); }
};

enum class IssueKind {
    EmptyProduction,          // a symbol has no monomial
    NonPositiveCoefficient,   // coefficient <= 0
    EpsilonMonomial,          // h = 0 and no symbol factors: empty object
    LinearPartNotNilpotent,   // pure-rename cycles admit infinite chains
    NotStronglyConnected,     // reachable symbols do not form one component
};

struct ValidationIssue {
    IssueKind kind;
    std::string detail;
};

// Structural admissibility checks; an empty report means the spec is
// well-formed for both the exact oracle and the tilted sampler.
std::vector<ValidationIssue> validate_spec(const CombinatorialSpec& spec);

const char* issue_name(IssueKind k);

}  // namespace cfboltz
