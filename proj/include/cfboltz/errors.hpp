#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfboltz {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input text does not match the grammar.
struct ParseError : Error {
    int line, col;
    ParseError(int line_, int col_, const std::string& what_)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                ": " + what_),
          line(line_), col(col_) {}
};

// The size class is empty: no object of the requested size exists.
struct EmptySizeClass : Error {
    std::uint64_t n;
    explicit EmptySizeClass(std::uint64_t n_)
        : Error("no structure of size " + std::to_string(n_)), n(n_) {}
};

// No finite derivation of the target symbol avoids target-symbol leaves,
// so the walk has no zero-ordinate step class.
struct NoExcursion : Error {
    NoExcursion() : Error("system admits no subtree free of target-symbol leaves") {}
};

// An iterative numeric routine exhausted its budget.
struct NoConvergence : Error {
    std::size_t iterations = 0;
    explicit NoConvergence(std::size_t iters)
        : Error("no convergence after " + std::to_string(iters) + " iterations"),
          iterations(iters) {}
    using Error::Error;
};

// The characteristic branch never turns critical inside the convergence
// region; the system is not admissible for singularity analysis.
struct DivergentSystem : Error {
    DivergentSystem() : Error("characteristic branch never turns critical") {}
    using Error::Error;
};

// A requested evaluation point lies outside the region where the reduced
// system has a subcritical solution.
struct OutsideSubcriticalBall : Error {
    OutsideSubcriticalBall()
        : Error("evaluation point outside the subcritical region") {}
    using Error::Error;
};

// The tilted measure cannot be built at this size; callers should fall
// back to the exact recursive sampler.
struct SizeTooSmall : Error {
    std::uint64_t n;
    explicit SizeTooSmall(std::uint64_t n_)
        : Error("tilted mixture undefined at size " + std::to_string(n_) +
                "; use the exact sampler"),
          n(n_) {}
};

// A branching-process realisation exceeded the node budget.
struct DepthRunaway : Error {
    DepthRunaway() : Error("branching process exceeded node budget") {}
};

// A piece list does not form a single tree (prefix rule violated).
struct MalformedExcursion : Error {
    using Error::Error;
};

// A step list handed to the rotation does not end at ordinate -1.
struct BadEndpoint : Error {
    BadEndpoint() : Error("step ordinates do not sum to -1") {}
};

// The restart loop exceeded its try budget (typically a periodic system
// whose size class is empty).
struct RestartBudgetExceeded : Error {
    using Error::Error;
};

// A certified bound was violated at run time; indicates a defect.
struct InvariantBreach : Error {
    using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
struct CapExceeded : Error {
    using Error::Error;
};

}  // namespace cfboltz
