#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "weyl/errors.hpp"

namespace weyl {

// Controls numerical evaluation of the improper integrals over lambda or r.
struct QuadratureSpec {
    double r_max = 6000.0; // dimensionless truncation radius
    int panels = 32;       // Gauss nodes per panel / subdivision budget
    double rel_tol = 1e-9;

    void validate() const {
        if (!(r_max > 0.0)) throw domain_error("QuadratureSpec: r_max must be > 0");
        if (panels < 8) throw domain_error("QuadratureSpec: panels must be >= 8");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw domain_error("QuadratureSpec: rel_tol in (0,1)");
    }
};

namespace detail {

// Gauss-Legendre rule on [-1,1], nodes by Newton iteration on P_n.
inline void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

inline const std::pair<std::vector<double>, std::vector<double>>& gl_cache(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::pair<std::vector<double>, std::vector<double>> rule;
        gauss_legendre_rule(n, rule.first, rule.second);
        it = cache.emplace(n, std::move(rule)).first;
    }
    return it->second;
}

} // namespace detail

// Fixed-order Gauss-Legendre on [a,b].
template <class F>
double gl_integrate(F&& f, double a, double b, int n = 32) {
    const auto& [x, w] = detail::gl_cache(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * f(mid + half * x[i]);
    return s * half;
}

namespace detail {

template <class F>
double simpson(F& f, double a, double fa, double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Integrate f over consecutive panels [b0,b1],[b1,b2],... with a fixed Gauss rule.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& breaks, int gl_order = 16) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += gl_integrate(f, breaks[i], breaks[i + 1], gl_order);
    return s;
}

// Repeated averaging (Euler transform) of the tail of a partial-sum sequence.
// Standard acceleration for alternating panel series from oscillatory integrands.
inline double euler_accelerate(const std::vector<double>& partial_sums, int tail = 24) {
    if (partial_sums.empty()) return 0.0;
    const int n = static_cast<int>(partial_sums.size());
    const int k = std::min(tail, n);
    std::vector<double> row(partial_sums.end() - k, partial_sums.end());
    while (row.size() > 1) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
    }
    return row[0];
}

} // namespace weyl
