#pragma once

// Shared fixtures for the test suites: builtin system texts, spec
// construction shortcuts, and a tiny subprocess harness for the CLI tests.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "cfboltz/parser.hpp"
#include "cfboltz/spec.hpp"

namespace testutil {

inline const char* kBinaryText = "A = z + A^2;\n";
inline const char* kRhvText =
    "R = z + H^2 + V^2 + R^4;\n"
    "H = z + V^2 + R^4;\n"
    "V = z + H^2 + R^4;\n";
// Two base pieces of size 1 with weights 2 and 1; exercises non-unit
// coefficients and a (nilpotent) pure rename.
inline const char* kWeightedText = "A = 2 z + B;\nB = z + A^2;\n";

inline cfboltz::CombinatorialSpec binary_spec() {
    return cfboltz::parse_spec(kBinaryText);
}
inline cfboltz::CombinatorialSpec rhv_spec() {
    return cfboltz::parse_spec(kRhvText);
}
inline cfboltz::CombinatorialSpec weighted_spec() {
    return cfboltz::parse_spec(kWeightedText);
}

inline bool spec_equal(const cfboltz::CombinatorialSpec& a,
                       const cfboltz::CombinatorialSpec& b) {
    if (a.symbols != b.symbols) return false;
    if (a.productions.size() != b.productions.size()) return false;
    for (std::size_t s = 0; s < a.productions.size(); ++s) {
        const auto& pa = a.productions[s];
        const auto& pb = b.productions[s];
        if (pa.size() != pb.size()) return false;
        for (std::size_t m = 0; m < pa.size(); ++m)
            if (pa[m].coeff != pb[m].coeff || pa[m].z_exp != pb[m].z_exp ||
                pa[m].sym_exp != pb[m].sym_exp)
                return false;
    }
    return true;
}

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

#ifdef CFBOLTZ_CLI_PATH
// Runs the built CLI with the given argument string; stdout and stderr are
// captured through temp files so exit status stays visible.
inline CliResult run_cli(const std::string& args) {
    static int serial = 0;
    std::string tag = std::to_string(++serial) + "_" + std::to_string(getpid());
    std::string out_path = "/tmp/cfboltz_test_out_" + tag;
    std::string err_path = "/tmp/cfboltz_test_err_" + tag;
    std::string cmd = std::string(CFBOLTZ_CLI_PATH) + " " + args + " >" +
                      out_path + " 2>" + err_path;
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}
#endif

}  // namespace testutil
