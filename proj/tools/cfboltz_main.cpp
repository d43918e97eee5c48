// Command-line front end: parsing and validation, characteristic constants,
// exact counting, sampling (accelerated and oracle), distribution checks and
// throughput benchmarks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "CLI11.hpp"

#include "cfboltz/bridge.hpp"
#include "cfboltz/catalog.hpp"
#include "cfboltz/critical.hpp"
#include "cfboltz/errors.hpp"
#include "cfboltz/oracle.hpp"
#include "cfboltz/parser.hpp"
#include "cfboltz/random.hpp"
#include "cfboltz/shuffle.hpp"
#include "cfboltz/spec.hpp"
#include "cfboltz/stats.hpp"
#include "cfboltz/toy.hpp"
#include "cfboltz/tree.hpp"

namespace {

using namespace cfboltz;

// exit codes: 2 parse error, 3 validation / bad usage, 4 empty size class,
// 5 numeric or sampling failure
template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const EmptySizeClass& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
}

struct ModelOpts {
    std::string spec_file;
    std::string model = "binary";

    bool is_toy() const { return spec_file.empty() && model == "toy"; }
};

void add_model_opts(CLI::App* cmd, ModelOpts& m) {
    auto* sf = cmd->add_option("--spec", m.spec_file,
                               "path to a system description file");
    cmd->add_option("--model", m.model, "builtin model: binary, rhv or toy")
        ->excludes(sf);
}

std::string builtin_model_text(const std::string& name) {
    if (name == "binary") return "A = z + A^2;\n";
    if (name == "rhv")
        return "R = z + H^2 + V^2 + R^4;\n"
               "H = z + V^2 + R^4;\n"
               "V = z + H^2 + R^4;\n";
    throw Error("unknown builtin model '" + name +
                "' (expected binary, rhv or toy)");
}

std::string spec_text(const ModelOpts& m) {
    if (!m.spec_file.empty()) {
        std::ifstream in(m.spec_file);
        if (!in) throw Error("cannot read spec file: " + m.spec_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return builtin_model_text(m.model);
}

void report_issues(const std::vector<ValidationIssue>& issues) {
    for (const auto& is : issues)
        std::cerr << "validation: " << issue_name(is.kind) << ": " << is.detail
                  << "\n";
}

// parse + structural checks; nullopt means issues were reported (exit 3)
std::optional<CombinatorialSpec> load_checked(const ModelOpts& m) {
    CombinatorialSpec spec = parse_spec(spec_text(m));
    auto issues = validate_spec(spec);
    if (!issues.empty()) {
        report_issues(issues);
        return std::nullopt;
    }
    return spec;
}

int toy_not_polynomial() {
    std::cerr << "validation: the toy walk model is not a polynomial system; "
                 "use it with sample, count, verify or bench\n";
    return 3;
}

// ---------------------------------------------------------------- parse --

int run_parse(const ModelOpts& m) {
    if (m.is_toy()) return toy_not_polynomial();
    CombinatorialSpec spec = parse_spec(spec_text(m));
    std::cout << render_spec(spec);
    auto issues = validate_spec(spec);
    if (!issues.empty()) {
        report_issues(issues);
        return 3;
    }
    return 0;
}

// ------------------------------------------------------------- critical --

int run_critical(const ModelOpts& m) {
    if (m.is_toy()) return toy_not_polynomial();
    auto spec = load_checked(m);
    if (!spec) return 3;
    CriticalData crit = solve_characteristic(*spec);
    SubtreeCatalog catalog = compute_catalog(*spec);
    DerivedConstants c = derived_constants(*spec, crit, catalog);
    std::printf("z %.12g\n", crit.zeta);
    for (std::size_t i = 0; i < spec->count(); ++i)
        std::printf("%s %.12g\n", spec->symbols[i].c_str(), crit.tau[i]);
    std::printf("a0 %.12g\n", c.a0);
    std::printf("aneq %.12g\n", c.aneq);
    std::printf("vbar %.12g\n", c.vbar);
    std::printf("eps %.12g\n", c.eps);
    std::printf("kappa %.12g\n", c.kappa_star);
    std::printf("mu %.12g\n", c.mu_star);
    std::printf("reach %.12g\n", c.reach_prob);
    std::printf("tol %.3g\n", crit.tol_achieved);
    return 0;
}

// ---------------------------------------------------------------- count --

int run_count(const ModelOpts& m, std::uint64_t n) {
    if (m.is_toy()) {
        // total weight sum_m 2^{n-2m} n!/(m! m! (n-2m)!) collapses to C(2n,n)
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), 2 * n, n);
        std::cout << c.get_str() << "\n";
        return 0;
    }
    auto spec = load_checked(m);
    if (!spec) return 3;
    ExactOracle oracle(*spec);
    std::cout << oracle.count_target(n).get_str() << "\n";
    return 0;
}

// ------------------------------------------------------------ rendering --

std::string format_tree(const CombinatorialSpec& spec, const ColoredTree& t,
                        const std::string& format) {
    return format == "jsonl" ? to_json(spec, t) : to_paren(spec, t);
}

std::string format_pieces(const CombinatorialSpec& spec,
                          const std::vector<Subtree>& pieces,
                          const std::string& format) {
    std::string out;
    if (format == "jsonl") {
        out = "{\"pieces\":[";
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) out += ',';
            out += to_json(spec, pieces[i]);
        }
        out += "]}";
    } else {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) out += ' ';
            out += to_paren(spec, pieces[i]);
        }
    }
    return out;
}

void render_rhv_svg(const CombinatorialSpec& spec, const ColoredTree& t,
                    const std::string& path) {
    bool shape_ok = spec.count() == 3 && spec.symbols[0] == "R" &&
                    spec.symbols[1] == "H" && spec.symbols[2] == "V";
    if (!shape_ok)
        throw Error("svg rendering is only defined for the rhv model");
    std::ostringstream body;
    std::size_t cur = 0;
    auto cell = [&](double x, double y, double w, double h) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "  <rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" "
                      "height=\"%.2f\" fill=\"white\" stroke=\"black\" "
                      "stroke-width=\"1\"/>\n",
                      x, y, w, h);
        body << buf;
    };
    auto walk = [&](auto&& self, double x, double y, double w,
                    double h) -> void {
        const TreeNode& nd = t.nodes.at(cur++);
        const Monomial& mono = spec.productions[nd.color][nd.mono];
        std::uint32_t deg = mono.sym_degree();
        if (deg == 0) {
            cell(x, y, w, h);
            return;
        }
        std::size_t child = 0;
        for (std::size_t b = 0; b < mono.sym_exp.size(); ++b)
            if (mono.sym_exp[b] > 0) child = b;
        if (deg == 2 && spec.symbols[child] == "H") {  // horizontal cut
            self(self, x, y, w, h / 2);
            self(self, x, y + h / 2, w, h / 2);
        } else if (deg == 2 && spec.symbols[child] == "V") {  // vertical cut
            self(self, x, y, w / 2, h);
            self(self, x + w / 2, y, w / 2, h);
        } else if (deg == 4) {  // both cuts, quadrants
            self(self, x, y, w / 2, h / 2);
            self(self, x + w / 2, y, w / 2, h / 2);
            self(self, x, y + h / 2, w / 2, h / 2);
            self(self, x + w / 2, y + h / 2, w / 2, h / 2);
        } else {
            throw Error("svg rendering hit an unexpected production shape");
        }
    };
    walk(walk, 6, 6, 500, 500);
    std::ofstream out(path);
    if (!out) throw Error("cannot write svg file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 512 "
           "512\">\n"
        << body.str() << "</svg>\n";
}

// --------------------------------------------------------------- sample --

struct SampleOpts {
    ModelOpts model;
    std::uint64_t n = 1;
    std::uint64_t count = 1;
    std::uint64_t seed = 1;
    std::string mode = "excursion";
    std::string method = "accelerated";
    std::string format = "tree-paren";
    unsigned jobs = 1;
    std::string svg_file;
};

int check_format(const std::string& format) {
    if (format == "tree-paren" || format == "jsonl") return 0;
    std::cerr << "validation: unknown format '" << format
              << "' (expected tree-paren or jsonl)\n";
    return 3;
}

// splits `count` into per-stream quotas; stream s owns a contiguous block
// of the output so the printed order is stream-then-index
std::vector<std::uint64_t> stream_quotas(std::uint64_t count, unsigned jobs) {
    std::vector<std::uint64_t> q(jobs);
    for (unsigned s = 0; s < jobs; ++s)
        q[s] = count / jobs + (s < count % jobs ? 1 : 0);
    return q;
}

template <typename Fn>
void run_streams(unsigned jobs, Fn&& body) {
    if (jobs <= 1) {
        body(0);
        return;
    }
    std::vector<std::exception_ptr> errs(jobs);
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (unsigned s = 0; s < jobs; ++s)
        threads.emplace_back([&, s] {
            try {
                body(s);
            } catch (...) {
                errs[s] = std::current_exception();
            }
        });
    for (auto& t : threads) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

int run_sample_toy(const SampleOpts& o) {
    if (o.method != "accelerated" && o.method != "naive-toy") {
        std::cerr << "validation: toy methods are accelerated or naive-toy\n";
        return 3;
    }
    if (!o.svg_file.empty()) {
        std::cerr << "validation: svg output needs the rhv model\n";
        return 3;
    }
    if (int rc = check_format(o.format)) return rc;
    unsigned jobs = std::max(1u, o.jobs);
    if (jobs > o.count) jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, o.count));
    auto quotas = stream_quotas(o.count, jobs);
    std::vector<std::vector<std::string>> lines(jobs);
    bool naive = o.method == "naive-toy";
    run_streams(jobs, [&](unsigned s) {
        BitSource bits(BitSource::sub_seed(o.seed, s));
        lines[s].reserve(quotas[s]);
        for (std::uint64_t i = 0; i < quotas[s]; ++i) {
            ToyBridge b = naive ? toy_naive(o.n, bits)
                                : toy_accelerated(o.n, bits);
            std::string out;
            if (o.format == "jsonl") {
                out = "{\"steps\":[";
                for (std::size_t j = 0; j < b.steps.size(); ++j) {
                    if (j) out += ',';
                    out += std::to_string(int(b.steps[j]));
                }
                out += "]}";
            } else {
                for (auto st : b.steps)
                    out += st > 0 ? '+' : (st < 0 ? '-' : '0');
            }
            lines[s].push_back(std::move(out));
        }
    });
    for (auto& v : lines)
        for (auto& l : v) std::cout << l << "\n";
    return 0;
}

int run_sample(const SampleOpts& o) {
    if (o.model.is_toy()) return run_sample_toy(o);
    if (o.mode != "bridge" && o.mode != "excursion") {
        std::cerr << "validation: unknown mode '" << o.mode
                  << "' (expected bridge or excursion)\n";
        return 3;
    }
    if (int rc = check_format(o.format)) return rc;
    if (o.method != "accelerated" && o.method != "oracle") {
        std::cerr << "validation: unknown method '" << o.method
                  << "' (expected accelerated or oracle)\n";
        return 3;
    }
    const bool bridge_mode = o.mode == "bridge";
    if (!o.svg_file.empty() && bridge_mode) {
        std::cerr << "validation: svg output needs excursion mode\n";
        return 3;
    }
    auto spec_opt = load_checked(o.model);
    if (!spec_opt) return 3;
    const CombinatorialSpec spec = std::move(*spec_opt);

    bool use_oracle = o.method == "oracle";
    std::optional<BridgeContext> ctx;
    if (!use_oracle) {
        try {
            ctx.emplace(build_bridge_context(spec, o.n));
        } catch (const SizeTooSmall&) {
            std::cerr << "note: size " << o.n
                      << " is below the tilted sampler's range; "
                         "falling back to the exact oracle\n";
            use_oracle = true;
        }
    }
    std::optional<ExactOracle> oracle;
    if (use_oracle) oracle.emplace(spec);

    unsigned jobs = std::max(1u, o.jobs);
    if (use_oracle && jobs > 1) {
        // the oracle extends shared series tables lazily; keep one stream
        std::cerr << "note: oracle sampling runs a single stream\n";
        jobs = 1;
    }
    if (jobs > o.count) jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, o.count));
    auto quotas = stream_quotas(o.count, jobs);

    std::vector<std::vector<std::string>> lines(jobs);
    std::optional<ColoredTree> svg_tree;
    run_streams(jobs, [&](unsigned s) {
        BitSource bits(BitSource::sub_seed(o.seed, s));
        lines[s].reserve(quotas[s]);
        for (std::uint64_t i = 0; i < quotas[s]; ++i) {
            if (bridge_mode) {
                std::vector<Subtree> pieces;
                if (use_oracle) {
                    // uniform rotation of an exact excursion list: every
                    // rotation has the same weight, so this is an exact
                    // bridge draw
                    ColoredTree t = oracle->sample(o.n, bits);
                    pieces = decompose_tree(spec, t);
                    std::uint64_t r = uniform_below(pieces.size(), bits);
                    std::rotate(pieces.begin(),
                                pieces.begin() + static_cast<std::ptrdiff_t>(r),
                                pieces.end());
                } else {
                    pieces = sample_bridge(*ctx, o.n, bits);
                }
                lines[s].push_back(format_pieces(spec, pieces, o.format));
            } else {
                ColoredTree t = use_oracle ? oracle->sample(o.n, bits)
                                           : sample_excursion(*ctx, o.n, bits);
                if (s == 0 && i == 0 && !o.svg_file.empty()) svg_tree = t;
                lines[s].push_back(format_tree(spec, t, o.format));
            }
        }
    });
    for (auto& v : lines)
        for (auto& l : v) std::cout << l << "\n";
    if (svg_tree) render_rhv_svg(spec, *svg_tree, o.svg_file);
    return 0;
}

// --------------------------------------------------------------- verify --

struct VerifyOpts {
    ModelOpts model;
    std::uint64_t n = 4;
    std::uint64_t count = 0;  // 0: 1000x the class count
    std::uint64_t seed = 1;
    std::uint64_t cap = 200000;
    std::string method = "accelerated";
};

int report_chi_square(std::uint64_t n, std::size_t classes,
                      std::uint64_t samples, const ChiSquare& cs) {
    bool pass = cs.p_value >= 0.001;
    std::printf("n=%llu classes=%llu samples=%llu stat=%.6g dof=%llu p=%.6g %s\n",
                static_cast<unsigned long long>(n),
                static_cast<unsigned long long>(classes),
                static_cast<unsigned long long>(samples), cs.stat,
                static_cast<unsigned long long>(cs.dof), cs.p_value,
                pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int run_verify_toy(const VerifyOpts& o) {
    if (o.method != "accelerated" && o.method != "naive-toy") {
        std::cerr << "validation: toy methods are accelerated or naive-toy\n";
        return 3;
    }
    if (o.n > 14) {
        std::cerr << "validation: toy verification enumerates 3^n walks; "
                     "choose n <= 14\n";
        return 3;
    }
    std::vector<ToyBridge> classes = toy_enumerate(o.n);
    std::unordered_map<std::string, std::size_t> index;
    mpq_class total = 0;
    std::vector<mpq_class> w(classes.size());
    auto key_of = [](const ToyBridge& b) {
        std::string k;
        for (auto st : b.steps) k += st > 0 ? '+' : (st < 0 ? '-' : '0');
        return k;
    };
    for (std::size_t i = 0; i < classes.size(); ++i) {
        std::uint64_t zeros = classes[i].n - 2 * classes[i].m;
        mpz_class two = 1;
        two <<= zeros;
        w[i] = mpq_class(two);
        total += w[i];
        index[key_of(classes[i])] = i;
    }
    std::vector<double> probs(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        mpq_class r = w[i] / total;
        probs[i] = r.get_d();
    }
    std::uint64_t samples = o.count ? o.count : 1000 * classes.size();
    bool naive = o.method == "naive-toy";
    BitSource bits(BitSource::sub_seed(o.seed, 0));
    std::vector<std::uint64_t> observed(classes.size(), 0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        ToyBridge b = naive ? toy_naive(o.n, bits) : toy_accelerated(o.n, bits);
        auto it = index.find(key_of(b));
        if (it == index.end())
            throw Error("sampled walk missing from the enumerated classes");
        ++observed[it->second];
    }
    ChiSquare cs = chi_square_test(observed, probs);
    return report_chi_square(o.n, classes.size(), samples, cs);
}

int run_verify(const VerifyOpts& o) {
    if (o.model.is_toy()) return run_verify_toy(o);
    auto spec_opt = load_checked(o.model);
    if (!spec_opt) return 3;
    const CombinatorialSpec spec = std::move(*spec_opt);
    if (o.method != "accelerated" && o.method != "oracle") {
        std::cerr << "validation: unknown method '" << o.method
                  << "' (expected accelerated or oracle)\n";
        return 3;
    }

    ExactOracle oracle(spec);
    std::vector<ColoredTree> classes = oracle.enumerate(o.n, o.cap);
    if (classes.empty()) throw EmptySizeClass(o.n);
    std::vector<mpq_class> w(classes.size());
    mpq_class total = 0;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        w[i] = tree_weight(spec, classes[i]);
        total += w[i];
        index[to_paren(spec, classes[i])] = i;
    }
    std::vector<double> probs(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        mpq_class r = w[i] / total;
        probs[i] = r.get_d();
    }

    bool use_oracle = o.method == "oracle";
    std::optional<BridgeContext> ctx;
    if (!use_oracle) {
        try {
            ctx.emplace(build_bridge_context(spec, o.n));
        } catch (const SizeTooSmall&) {
            std::cerr << "note: size " << o.n
                      << " is below the tilted sampler's range; "
                         "falling back to the exact oracle\n";
            use_oracle = true;
        }
    }
    std::uint64_t samples = o.count ? o.count : 1000 * classes.size();
    BitSource bits(BitSource::sub_seed(o.seed, 0));
    std::vector<std::uint64_t> observed(classes.size(), 0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        ColoredTree t = use_oracle ? oracle.sample(o.n, bits)
                                   : sample_excursion(*ctx, o.n, bits);
        auto it = index.find(to_paren(spec, t));
        if (it == index.end())
            throw Error("sampled object missing from the enumerated classes");
        ++observed[it->second];
    }
    ChiSquare cs = chi_square_test(observed, probs);
    return report_chi_square(o.n, classes.size(), samples, cs);
}

// ---------------------------------------------------------------- bench --

struct BenchOpts {
    ModelOpts model;
    std::string sizes = "1000,10000,100000";
    std::uint64_t count = 100;
    std::uint64_t seed = 1;
};

std::vector<std::uint64_t> parse_sizes(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw Error("no sizes given");
    return out;
}

void bench_row(std::uint64_t n, std::uint64_t time_ns, double restarts,
               double bits, double reach, double racc) {
    std::printf("%llu,%llu,%.6g,%.6g,%.6g,%.6g\n",
                static_cast<unsigned long long>(n),
                static_cast<unsigned long long>(time_ns), restarts, bits,
                reach, racc);
}

void bench_entropy_note(std::uint64_t n, double bits_per_sample,
                        double denom_per_atom) {
    std::fprintf(stderr, "# size=%llu bits/sample=%.1f entropy-ratio=%.4f\n",
                 static_cast<unsigned long long>(n), bits_per_sample,
                 bits_per_sample / (denom_per_atom * double(n)));
}

int run_bench(const BenchOpts& o) {
    std::vector<std::uint64_t> sizes = parse_sizes(o.sizes);
    std::cout << "size,time_ns,restarts,bits,reach,racc\n";
    if (o.model.is_toy()) {
        for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
            std::uint64_t n = sizes[idx];
            BitSource bits(BitSource::sub_seed(o.seed, idx));
            ToyStats st;
            auto t0 = std::chrono::steady_clock::now();
            for (std::uint64_t i = 0; i < o.count; ++i)
                toy_accelerated(n, bits, &st);
            auto t1 = std::chrono::steady_clock::now();
            auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          t1 - t0)
                          .count();
            double bps = double(bits.bits_consumed()) / double(o.count);
            double reach = double(st.reaches) / double(st.restarts + o.count);
            double racc =
                st.reaches ? double(o.count) / double(st.reaches) : 0.0;
            bench_row(n, std::uint64_t(ns) / o.count,
                      double(st.restarts) / double(o.count), bps, reach, racc);
            // i.i.d. (1/4,1/2,1/4) letters carry 1.5 bits each
            bench_entropy_note(n, bps, 1.5);
        }
        return 0;
    }
    auto spec_opt = load_checked(o.model);
    if (!spec_opt) return 3;
    const CombinatorialSpec spec = std::move(*spec_opt);
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        std::uint64_t n = sizes[idx];
        // plan construction is a fixed per-size cost, excluded from time_ns
        BridgeContext ctx = build_bridge_context(spec, n);
        BitSource bits(BitSource::sub_seed(o.seed, idx));
        BridgeStats st;
        auto t0 = std::chrono::steady_clock::now();
        for (std::uint64_t i = 0; i < o.count; ++i)
            sample_excursion(ctx, n, bits, &st);
        auto t1 = std::chrono::steady_clock::now();
        auto ns =
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count();
        double bps = double(bits.bits_consumed()) / double(o.count);
        double reach = double(st.reaches) / double(st.restarts + o.count);
        double racc = st.reaches ? double(o.count) / double(st.reaches) : 0.0;
        bench_row(n, std::uint64_t(ns) / o.count,
                  double(st.restarts) / double(o.count), bps, reach, racc);
        bench_entropy_note(n, bps, std::log2(1.0 / ctx.crit.zeta));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-size random sampler for context-free tree systems"};
    app.require_subcommand(1);

    ModelOpts parse_m;
    auto* cmd_parse =
        app.add_subcommand("parse", "echo the canonical form and validate");
    add_model_opts(cmd_parse, parse_m);

    ModelOpts crit_m;
    auto* cmd_critical = app.add_subcommand(
        "critical", "print the characteristic point and derived constants");
    add_model_opts(cmd_critical, crit_m);

    ModelOpts count_m;
    std::uint64_t count_n = 1;
    auto* cmd_count =
        app.add_subcommand("count", "exact weighted count of size-n objects");
    add_model_opts(cmd_count, count_m);
    cmd_count->add_option("-n,--size", count_n, "object size")->required();

    SampleOpts so;
    auto* cmd_sample =
        app.add_subcommand("sample", "draw exact size-n objects");
    add_model_opts(cmd_sample, so.model);
    cmd_sample->add_option("-n,--size", so.n, "object size")->required();
    cmd_sample->add_option("-c,--count", so.count, "number of samples");
    cmd_sample->add_option("--seed", so.seed, "PRNG seed");
    cmd_sample->add_option("--mode", so.mode, "bridge or excursion");
    cmd_sample->add_option("--method", so.method,
                           "accelerated, oracle or naive-toy");
    cmd_sample->add_option("--format", so.format, "tree-paren or jsonl");
    cmd_sample->add_option("-j,--jobs", so.jobs,
                           "independent sampling streams");
    cmd_sample->add_option("--svg", so.svg_file,
                           "write the first sample as an svg subdivision "
                           "(rhv excursions only)");

    VerifyOpts vo;
    auto* cmd_verify = app.add_subcommand(
        "verify", "chi-square check of the sampler against exact enumeration");
    add_model_opts(cmd_verify, vo.model);
    cmd_verify->add_option("-n,--size", vo.n, "object size")->required();
    cmd_verify->add_option("-c,--count", vo.count,
                           "samples (default 1000x classes)");
    cmd_verify->add_option("--seed", vo.seed, "PRNG seed");
    cmd_verify->add_option("--cap", vo.cap, "enumeration cap");
    cmd_verify->add_option("--method", vo.method,
                           "accelerated, oracle or naive-toy");

    BenchOpts bo;
    auto* cmd_bench =
        app.add_subcommand("bench", "per-sample cost across sizes (CSV)");
    add_model_opts(cmd_bench, bo.model);
    cmd_bench->add_option("--sizes", bo.sizes, "comma-separated sizes");
    cmd_bench->add_option("-c,--count", bo.count, "samples per size");
    cmd_bench->add_option("--seed", bo.seed, "PRNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    if (*cmd_parse) return guarded([&] { return run_parse(parse_m); });
    if (*cmd_critical) return guarded([&] { return run_critical(crit_m); });
    if (*cmd_count)
        return guarded([&] { return run_count(count_m, count_n); });
    if (*cmd_sample) return guarded([&] { return run_sample(so); });
    if (*cmd_verify) return guarded([&] { return run_verify(vo); });
    if (*cmd_bench) return guarded([&] { return run_bench(bo); });
    return 3;
}
