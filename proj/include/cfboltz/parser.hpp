#pragma once

#include <string>

#include "cfboltz/spec.hpp"

namespace cfboltz {

// Grammar (whitespace and #-comments are skipped):
//   spec   := eq+
//   eq     := SYMBOL "=" term ("+" term)* ";"
//   term   := [coef "*"?] factor ("*"? factor)*
//   factor := ("z" | SYMBOL) ["^" INT]
//   coef   := INT | INT "/" INT | DECIMAL
// The first equation's left-hand side becomes symbol 0 (the target).
// Like terms are merged; decimal coefficients become exact rationals.
// Throws ParseError with 1-based line/column coordinates.
CombinatorialSpec parse_spec(const std::string& text);

// Canonical renderer: one equation per line in declaration order, monomials
// sorted by z-degree descending then symbol exponents lexicographically,
// unit coefficients omitted. parse_spec(render_spec(s)) == s.
std::string render_spec(const CombinatorialSpec& spec);

}  // namespace cfboltz
