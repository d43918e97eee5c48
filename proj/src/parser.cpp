#include "cfboltz/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line = 1, col = 1;

    bool eof() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    char take() {
        char c = s[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }
};

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string read_ident(Cursor& cur) {
    std::string id;
    while (!cur.eof() && is_ident_char(cur.peek())) id.push_back(cur.take());
    return id;
}

std::string read_digits(Cursor& cur) {
    std::string d;
    while (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek())))
        d.push_back(cur.take());
    return d;
}

// INT, INT/INT, or DECIMAL, converted to an exact rational.
mpq_class read_coef(Cursor& cur) {
    std::string intpart = read_digits(cur);
    if (!cur.eof() && cur.peek() == '.') {
        cur.take();
        std::string frac = read_digits(cur);
        if (frac.empty()) cur.fail("digits expected after decimal point");
        mpz_class num(intpart.empty() ? "0" : intpart);
        mpz_class den = 1;
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == '/') {
        cur.take();
        cur.skip_ws();
        std::string den = read_digits(cur);
        if (den.empty()) cur.fail("denominator expected");
        mpq_class q{mpz_class(intpart), mpz_class(den)};
        if (q.get_den() == 0) cur.fail("zero denominator");
        q.canonicalize();
        return q;
    }
    return mpq_class(mpz_class(intpart));
}

struct RawFactor {
    std::string name;  // "z" or symbol
    std::uint32_t exp;
};

struct RawTerm {
    mpq_class coeff = 1;
    std::vector<RawFactor> factors;
    int line, col;
};

struct RawEq {
    std::string lhs;
    std::vector<RawTerm> terms;
    int line, col;
};

std::uint32_t read_exponent(Cursor& cur) {
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == '^') {
        cur.take();
        cur.skip_ws();
        std::string d = read_digits(cur);
        if (d.empty()) cur.fail("exponent expected after '^'");
        unsigned long v = std::stoul(d);
        if (v > 64) cur.fail("exponent too large");
        return static_cast<std::uint32_t>(v);
    }
    return 1;
}

RawTerm read_term(Cursor& cur) {
    RawTerm t;
    cur.skip_ws();
    t.line = cur.line;
    t.col = cur.col;
    if (cur.eof()) cur.fail("term expected");
    if (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
        t.coeff = read_coef(cur);
        cur.skip_ws();
        if (!cur.eof() && cur.peek() == '*') cur.take();
    }
    bool first = true;
    for (;;) {
        cur.skip_ws();
        if (cur.eof() || !is_ident_start(cur.peek())) {
            if (first) cur.fail("factor expected");
            break;
        }
        RawFactor f;
        f.name = read_ident(cur);
        f.exp = read_exponent(cur);
        t.factors.push_back(f);
        first = false;
        cur.skip_ws();
        if (!cur.eof() && cur.peek() == '*') cur.take();
    }
    return t;
}

}  // namespace

CombinatorialSpec parse_spec(const std::string& text) {
    Cursor cur{text};
    std::vector<RawEq> eqs;
    cur.skip_ws();
    if (cur.eof()) cur.fail("empty input");
    while (!cur.eof()) {
        RawEq eq;
        eq.line = cur.line;
        eq.col = cur.col;
        if (!is_ident_start(cur.peek())) cur.fail("symbol expected");
        eq.lhs = read_ident(cur);
        if (eq.lhs == "z") cur.fail("'z' is the atom, not a symbol");
        if (!std::isupper(static_cast<unsigned char>(eq.lhs[0])))
            cur.fail("symbols start with an uppercase letter");
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '=') cur.fail("'=' expected");
        cur.take();
        eq.terms.push_back(read_term(cur));
        cur.skip_ws();
        while (!cur.eof() && cur.peek() == '+') {
            cur.take();
            eq.terms.push_back(read_term(cur));
            cur.skip_ws();
        }
        if (cur.eof() || cur.peek() != ';') cur.fail("';' expected");
        cur.take();
        eqs.push_back(std::move(eq));
        cur.skip_ws();
    }

    CombinatorialSpec spec;
    std::map<std::string, std::size_t> index;
    for (const auto& eq : eqs) {
        if (index.count(eq.lhs))
            throw ParseError(eq.line, eq.col, "symbol '" + eq.lhs + "' redefined");
        index[eq.lhs] = spec.symbols.size();
        spec.symbols.push_back(eq.lhs);
    }
    spec.productions.resize(spec.count());

    for (std::size_t e = 0; e < eqs.size(); ++e) {
        for (const auto& term : eqs[e].terms) {
            Monomial mono;
            mono.coeff = term.coeff;
            mono.sym_exp.assign(spec.count(), 0);
            for (const auto& f : term.factors) {
                if (f.name == "z") {
                    mono.z_exp += f.exp;
                } else {
                    if (!std::isupper(static_cast<unsigned char>(f.name[0])))
                        throw ParseError(term.line, term.col,
                                         "symbols start with an uppercase letter");
                    auto it = index.find(f.name);
                    if (it == index.end())
                        throw ParseError(term.line, term.col,
                                         "unknown symbol '" + f.name + "'");
                    mono.sym_exp[it->second] += f.exp;
                }
            }
            // Merge like terms.
            auto& prod = spec.productions[e];
            auto same = std::find_if(prod.begin(), prod.end(), [&](const Monomial& m) {
                return m.z_exp == mono.z_exp && m.sym_exp == mono.sym_exp;
            });
            if (same != prod.end())
                same->coeff += mono.coeff;
            else
                prod.push_back(std::move(mono));
        }
    }
    return spec;
}

std::string render_spec(const CombinatorialSpec& spec) {
    std::ostringstream out;
    for (std::size_t a = 0; a < spec.count(); ++a) {
        auto monos = spec.productions[a];
        std::sort(monos.begin(), monos.end(), [](const Monomial& x, const Monomial& y) {
            if (x.z_exp != y.z_exp) return x.z_exp > y.z_exp;
            return x.sym_exp < y.sym_exp;
        });
        out << spec.symbols[a] << " =";
        bool first = true;
        for (const auto& mono : monos) {
            out << (first ? " " : " + ");
            first = false;
            bool printed = false;
            if (mono.coeff != 1) {
                out << mono.coeff.get_str();
                printed = true;
            }
            if (mono.z_exp > 0) {
                out << (printed ? " " : "") << "z";
                if (mono.z_exp > 1) out << "^" << mono.z_exp;
                printed = true;
            }
            for (std::size_t b = 0; b < spec.count(); ++b) {
                if (mono.sym_exp[b] == 0) continue;
                out << (printed ? " " : "") << spec.symbols[b];
                if (mono.sym_exp[b] > 1) out << "^" << mono.sym_exp[b];
                printed = true;
            }
            if (!printed) out << "1";  // epsilon monomial; invalid but renderable
        }
        out << ";\n";
    }
    return out.str();
}

}  // namespace cfboltz
