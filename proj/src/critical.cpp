#include "cfboltz/critical.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cfboltz/errors.hpp"

namespace cfboltz {

namespace {

template <class T>
using Vec = std::vector<T>;
template <class T>
using Mat = std::vector<Vec<T>>;

template <class T>
T to_scalar(const mpq_class& q) {
    if constexpr (std::is_same_v<T, double>) {
        return q.get_d();
    } else {
        // two-double split keeps ~106 bits of the rational
        double d0 = q.get_d();
        mpq_class r = q - mpq_class(d0);
        return static_cast<T>(d0) + static_cast<T>(r.get_d());
    }
}

template <class T>
T abs_val(T x) {
    return x < T(0) ? -x : x;
}

template <class T>
T pow_u(T x, std::uint32_t e) {
    T r(1);
    while (e) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

// One monomial evaluated with y_b replaced by its derivative pattern:
// dy counts how many derivatives fall on each variable (0, 1 or 2 total).
template <class T>
T mono_val(const Monomial& mono, T z, const Vec<T>& y, int dz, int db, int dc) {
    T r = to_scalar<T>(mono.coeff);
    {
        std::int64_t e = mono.z_exp;
        if (dz) {
            if (e == 0) return T(0);
            r *= T(double(e));
            e -= 1;
        }
        r *= pow_u(z, static_cast<std::uint32_t>(e));
    }
    for (std::size_t b = 0; b < y.size(); ++b) {
        std::int64_t e = mono.sym_exp[b];
        if (db == static_cast<int>(b)) {
            if (e == 0) return T(0);
            r *= T(double(e));
            e -= 1;
        }
        if (dc == static_cast<int>(b)) {
            if (e == 0) return T(0);
            r *= T(double(e));
            e -= 1;
        }
        r *= pow_u(y[b], static_cast<std::uint32_t>(e));
    }
    return r;
}

template <class T>
T phi_one(const CombinatorialSpec& spec, std::size_t a, T z, const Vec<T>& y,
          int dz = 0, int db = -1, int dc = -1) {
    T s(0);
    for (const auto& mono : spec.productions[a]) s += mono_val(mono, z, y, dz, db, dc);
    return s;
}

template <class T>
Vec<T> phi_all(const CombinatorialSpec& spec, T z, const Vec<T>& y) {
    Vec<T> out(spec.count());
    for (std::size_t a = 0; a < spec.count(); ++a) out[a] = phi_one(spec, a, z, y);
    return out;
}

template <class T>
Mat<T> jacobian(const CombinatorialSpec& spec, T z, const Vec<T>& y) {
    const std::size_t n = spec.count();
    Mat<T> k(n, Vec<T>(n, T(0)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            k[a][b] = phi_one(spec, a, z, y, 0, static_cast<int>(b));
    return k;
}

// LU with partial pivoting; returns false when singular to working precision.
template <class T>
bool lu_solve(Mat<T> a, Vec<T> b, Vec<T>& x) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs_val(a[r][c]) > abs_val(a[piv][c])) piv = r;
        if (!(abs_val(a[piv][c]) > T(0))) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            T f = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, T(0));
    for (std::size_t r = n; r-- > 0;) {
        T s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

template <class T>
T det_lu(Mat<T> a) {
    const std::size_t n = a.size();
    T det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs_val(a[r][c]) > abs_val(a[piv][c])) piv = r;
        if (!(abs_val(a[piv][c]) > T(0))) return T(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            T f = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
        }
    }
    return det;
}

// adj(M)_{ij} = (-1)^{i+j} det(M with row j, column i removed); dimensions
// here are tiny, so cofactor expansion is fine and stays stable near
// singular M where det * inverse would not.
template <class T>
Mat<T> adjugate(const Mat<T>& m) {
    const std::size_t n = m.size();
    Mat<T> adj(n, Vec<T>(n, T(0)));
    if (n == 1) {
        adj[0][0] = T(1);
        return adj;
    }
    Mat<T> minor(n - 1, Vec<T>(n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t r = 0, rr = 0; r < n; ++r) {
                if (r == j) continue;
                for (std::size_t c = 0, cc = 0; c < n; ++c) {
                    if (c == i) continue;
                    minor[rr][cc++] = m[r][c];
                }
                ++rr;
            }
            T d = det_lu(minor);
            adj[i][j] = ((i + j) % 2 == 0) ? d : -d;
        }
    return adj;
}

// Newton on the joint system [Phi - y; det(I - K)] in unknowns (y, z).
template <class T>
bool joint_newton(const CombinatorialSpec& spec, T& z, Vec<T>& y,
                  std::size_t iters) {
    const std::size_t n = spec.count();
    const std::size_t dim = n + 1;
    auto residual = [&](T zz, const Vec<T>& yy, Vec<T>& g) {
        Vec<T> ph = phi_all(spec, zz, yy);
        Mat<T> im = jacobian(spec, zz, yy);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                im[a][b] = (a == b ? T(1) : T(0)) - im[a][b];
        g.assign(dim, T(0));
        for (std::size_t a = 0; a < n; ++a) g[a] = ph[a] - yy[a];
        g[n] = det_lu(im);
    };
    auto norm = [&](const Vec<T>& g) {
        T s(0);
        for (const T& v : g) s = std::max<T>(s, abs_val(v));
        return s;
    };
    Vec<T> g;
    residual(z, y, g);
    T gn = norm(g);
    for (std::size_t it = 0; it < iters; ++it) {
        Mat<T> k = jacobian(spec, z, y);
        Mat<T> im(n, Vec<T>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                im[a][b] = (a == b ? T(1) : T(0)) - k[a][b];
        Mat<T> adj = adjugate(im);
        Mat<T> jac(dim, Vec<T>(dim, T(0)));
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b)
                jac[a][b] = k[a][b] - (a == b ? T(1) : T(0));
            jac[a][n] = phi_one(spec, a, z, y, 1);
        }
        for (std::size_t b = 0; b < n; ++b) {
            T s(0);
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    s += adj[p][q] *
                         phi_one(spec, q, z, y, 0, static_cast<int>(p),
                                 static_cast<int>(b));
            jac[n][b] = -s;
        }
        {
            T s(0);
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    s += adj[p][q] * phi_one(spec, q, z, y, 1, static_cast<int>(p));
            jac[n][n] = -s;
        }
        Vec<T> rhs(dim), step;
        for (std::size_t i = 0; i < dim; ++i) rhs[i] = -g[i];
        if (!lu_solve(jac, rhs, step)) return gn < T(1e-10);
        T scale(1);
        bool moved = false;
        for (int half = 0; half < 48; ++half) {
            Vec<T> yn(n);
            bool pos = true;
            for (std::size_t a = 0; a < n; ++a) {
                yn[a] = y[a] + scale * step[a];
                if (!(yn[a] > T(0))) pos = false;
            }
            T zn = z + scale * step[n];
            if (pos && zn > T(0)) {
                Vec<T> g2;
                residual(zn, yn, g2);
                T gn2 = norm(g2);
                if (gn2 < gn) {
                    y = std::move(yn);
                    z = zn;
                    g = std::move(g2);
                    gn = gn2;
                    moved = true;
                    break;
                }
            }
            scale /= T(2);
        }
        if (!moved) break;
    }
    return true;
}

struct Probe {
    bool diverged = false;
    Vec<double> y;
    double lambda = 0;
};

// Monotone iteration from 0 finds the least fixed point when one exists;
// a short Newton polish sharpens it away from the critical slowdown.
Probe probe_z(const CombinatorialSpec& spec, double z) {
    const std::size_t n = spec.count();
    Probe p;
    p.y.assign(n, 0.0);
    for (std::size_t it = 0; it < 200000; ++it) {
        Vec<double> yn = phi_all(spec, z, p.y);
        double delta = 0, mag = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (yn[a] > 1e12 || !std::isfinite(yn[a])) {
                p.diverged = true;
                return p;
            }
            delta = std::max(delta, std::abs(yn[a] - p.y[a]));
            mag = std::max(mag, std::abs(yn[a]));
        }
        p.y = std::move(yn);
        if (delta < 1e-15 * (1 + mag)) break;
    }
    for (int it = 0; it < 60; ++it) {
        Mat<double> k = jacobian(spec, z, p.y);
        Mat<double> im(n, Vec<double>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                im[a][b] = (a == b ? 1.0 : 0.0) - k[a][b];
        Vec<double> rhs(n), step;
        Vec<double> ph = phi_all(spec, z, p.y);
        double resid = 0;
        for (std::size_t a = 0; a < n; ++a) {
            rhs[a] = ph[a] - p.y[a];
            resid = std::max(resid, std::abs(rhs[a]));
        }
        if (resid < 1e-15) break;
        if (!lu_solve(im, rhs, step)) break;
        Vec<double> yn(n);
        bool ok = true;
        for (std::size_t a = 0; a < n; ++a) {
            yn[a] = p.y[a] + step[a];
            if (!(yn[a] >= 0) || !std::isfinite(yn[a])) ok = false;
        }
        if (!ok) break;
        p.y = std::move(yn);
    }
    auto [lam, vec] = frobenius_eigenvalue(jacobian(spec, z, p.y), 1e-12);
    (void)vec;
    p.lambda = lam;
    return p;
}

}  // namespace

std::pair<double, std::vector<double>> frobenius_eigenvalue(
    const std::vector<std::vector<double>>& m, double tol) {
    const std::size_t n = m.size();
    if (n == 0) return {0.0, {}};
    Vec<double> v(n, 1.0);
    double hi = 0, lo = 0;
    for (std::size_t it = 0; it < 200000; ++it) {
        Vec<double> w(n, 0.0);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) w[a] += m[a][b] * v[b];
            w[a] += v[a];  // shift by I keeps periodic supports converging
        }
        hi = -1e300;
        lo = 1e300;
        double mx = 0;
        for (std::size_t a = 0; a < n; ++a) {
            double r = w[a] / v[a];
            hi = std::max(hi, r);
            lo = std::min(lo, r);
            mx = std::max(mx, w[a]);
        }
        if (!std::isfinite(hi) || !std::isfinite(mx)) throw NoConvergence(it);
        for (std::size_t a = 0; a < n; ++a) v[a] = w[a] / mx;
        if (hi - lo <= tol * std::max(1.0, std::abs(hi))) return {(hi + lo) / 2 - 1, v};
    }
    // max ratio is always an upper bound on the eigenvalue, so a stalled
    // iteration (defective or reducible input) still yields a safe answer
    // for subcriticality checks
    if (std::isfinite(hi)) return {hi - 1, v};
    throw NoConvergence(200000);
}

CriticalData solve_characteristic(const CombinatorialSpec& spec, double tol) {
    const std::size_t n = spec.count();
    std::optional<std::pair<double, Probe>> best;
    double z_hi = 1e-6, z_lo = 0;
    for (;; z_hi *= 2) {
        if (z_hi > 1e9) throw DivergentSystem();
        Probe p = probe_z(spec, z_hi);
        if (p.diverged || p.lambda >= 1) break;
        best = {z_hi, p};
        z_lo = z_hi;
    }
    for (int it = 0; it < 200; ++it) {
        if (best && best->second.lambda >= 0.95) break;
        if (z_hi - z_lo <= 1e-14 * z_hi) break;
        double zm = (z_lo + z_hi) / 2;
        Probe p = probe_z(spec, zm);
        if (p.diverged || p.lambda >= 1) {
            z_hi = zm;
        } else {
            z_lo = zm;
            best = {zm, p};
        }
    }
    if (!best) throw NoConvergence(200);

    double z = best->first;
    Vec<double> y = best->second.y;
    joint_newton<double>(spec, z, y, 200);

    __float128 zq = z;
    Vec<__float128> yq(n);
    for (std::size_t a = 0; a < n; ++a) yq[a] = y[a];
    joint_newton<__float128>(spec, zq, yq, 8);
    z = static_cast<double>(zq);
    for (std::size_t a = 0; a < n; ++a) y[a] = static_cast<double>(yq[a]);

    CriticalData crit;
    crit.zeta = z;
    crit.tau = y;
    crit.theta = y[0];
    crit.kmat = jacobian(spec, z, y);
    auto [lam, vec] = frobenius_eigenvalue(crit.kmat, 1e-13);
    crit.frob_vec.resize(n);
    for (std::size_t a = 0; a < n; ++a) crit.frob_vec[a] = vec[a] / vec[0];
    double resid = std::abs(lam - 1);
    Vec<double> ph = phi_all(spec, z, y);
    for (std::size_t a = 0; a < n; ++a)
        resid = std::max(resid, std::abs(ph[a] - y[a]));
    crit.tol_achieved = resid;
    if (resid > std::max(tol, 1e-9)) throw NoConvergence(200);
    return crit;
}

ReducedSolution solve_reduced_system(const CombinatorialSpec& spec, double z,
                                     double u, double tol) {
    const std::size_t n = spec.count();
    const std::size_t m = n - 1;
    Vec<double> yfull(n, 0.0);
    yfull[0] = u;
    auto step_all = [&]() {
        Vec<double> out(m);
        for (std::size_t b = 1; b < n; ++b) out[b - 1] = phi_one(spec, b, z, yfull);
        return out;
    };
    for (std::size_t it = 0; it < 300000 && m > 0; ++it) {
        Vec<double> yn = step_all();
        double delta = 0, mag = 0;
        for (std::size_t b = 0; b < m; ++b) {
            if (yn[b] > 1e12 || !std::isfinite(yn[b]))
                throw OutsideSubcriticalBall();
            delta = std::max(delta, std::abs(yn[b] - yfull[b + 1]));
            mag = std::max(mag, yn[b]);
            yfull[b + 1] = yn[b];
        }
        if (delta < tol * (1 + mag)) break;
    }
    if (m > 0) {
        // Newton polish on the inner block
        for (int it = 0; it < 40; ++it) {
            Mat<double> im(m, Vec<double>(m));
            for (std::size_t a = 1; a < n; ++a)
                for (std::size_t b = 1; b < n; ++b)
                    im[a - 1][b - 1] = (a == b ? 1.0 : 0.0) -
                                       phi_one(spec, a, z, yfull, 0,
                                               static_cast<int>(b));
            Vec<double> rhs(m), stepv;
            double resid = 0;
            for (std::size_t a = 1; a < n; ++a) {
                rhs[a - 1] = phi_one(spec, a, z, yfull) - yfull[a];
                resid = std::max(resid, std::abs(rhs[a - 1]));
            }
            if (resid < 1e-16) break;
            if (!lu_solve(im, rhs, stepv)) break;
            bool ok = true;
            for (std::size_t b = 0; b < m; ++b)
                if (!(yfull[b + 1] + stepv[b] >= 0) ||
                    !std::isfinite(yfull[b + 1] + stepv[b]))
                    ok = false;
            if (!ok) break;
            for (std::size_t b = 0; b < m; ++b) yfull[b + 1] += stepv[b];
        }
        Mat<double> kred(m, Vec<double>(m));
        for (std::size_t a = 1; a < n; ++a)
            for (std::size_t b = 1; b < n; ++b)
                kred[a - 1][b - 1] =
                    phi_one(spec, a, z, yfull, 0, static_cast<int>(b));
        auto [lam, vec] = frobenius_eigenvalue(kred, 1e-10);
        (void)vec;
        if (lam >= 1) throw OutsideSubcriticalBall();
    }
    ReducedSolution sol;
    sol.y.assign(yfull.begin() + 1, yfull.end());
    sol.a = phi_one(spec, 0, z, yfull);
    return sol;
}

double drift_function_f(const CombinatorialSpec& spec, const CriticalData& crit,
                        const SubtreeCatalog& catalog, double x) {
    const double v0 = static_cast<double>(catalog.v0);
    const double a0 =
        catalog.t0.get_d() * std::pow(crit.zeta, v0) / crit.theta;
    const double base =
        solve_reduced_system(spec, crit.zeta, crit.theta).a / crit.theta - a0;
    const double za = crit.zeta * std::exp(x);
    const double ua = crit.theta * std::exp(v0 * x);
    const double val =
        std::exp(-v0 * x) * solve_reduced_system(spec, za, ua).a / crit.theta -
        a0;
    return std::log(val / base);
}

DerivedConstants derived_constants(const CombinatorialSpec& spec,
                                   const CriticalData& crit,
                                   const SubtreeCatalog& catalog) {
    DerivedConstants c;
    const double v0 = static_cast<double>(catalog.v0);
    c.a0 = catalog.t0.get_d() * std::pow(crit.zeta, v0) / crit.theta;
    c.aneq = solve_reduced_system(spec, crit.zeta, crit.theta).a / crit.theta -
             c.a0;
    const double h = 1e-5;
    {
        double up =
            solve_reduced_system(spec, crit.zeta * std::exp(h), crit.theta).a /
            crit.theta;
        double dn =
            solve_reduced_system(spec, crit.zeta * std::exp(-h), crit.theta).a /
            crit.theta;
        c.vbar = (up - dn) / (2 * h);
    }
    c.eps = std::sqrt(3 * c.aneq / c.vbar);
    c.kappa_star = c.aneq / c.vbar;
    c.mu_star = c.a0 / c.vbar;
    {
        double up = std::exp(drift_function_f(spec, crit, catalog, h));
        double dn = std::exp(drift_function_f(spec, crit, catalog, -h));
        c.reach_prob = 2 * h / (up - dn);
    }
    return c;
}

}  // namespace cfboltz
