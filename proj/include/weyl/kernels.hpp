#pragma once

// Special kernels behind the Stieltjes-transform machinery: the kappa weight,
// the Jackson smoothing pair (ell, K), the free-space Yukawa Green's function
// and its method-of-images periodization on the flat torus.

#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/quadrature.hpp"

namespace weyl {

inline constexpr double pi = 3.14159265358979323846;

// kappa(z) = (8/pi) (sin z - z cos z) / z^3, entire.
// Below |z| = 0.1 the direct form loses ~|z|^-3 ulp to cancellation; a 4-term
// Taylor series is exact to machine precision there.
template <class T>
T kappa(T z) {
    const double az = std::abs(z);
    if (az < 0.1) {
        const T z2 = z * z;
        return (8.0 / pi) *
               (1.0 / 3.0 + z2 * (-1.0 / 30.0 + z2 * (1.0 / 840.0 - z2 / 45360.0)));
    }
    return (8.0 / pi) * (std::sin(z) - z * std::cos(z)) / (z * z * z);
}

namespace detail {

// Positive roots of sin z - z cos z = 0 (i.e. tan z = z), ascending.
inline const std::vector<double>& kappa_zeros(std::size_t count) {
    static std::vector<double> zeros;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    while (zeros.size() < count) {
        const std::size_t j = zeros.size() + 1;
        double z = (j + 0.5) * pi;
        for (int it = 0; it < 60; ++it) {
            const double f = std::sin(z) - z * std::cos(z);
            const double fp = z * std::sin(z);
            const double dz = f / fp;
            z -= dz;
            if (std::abs(dz) < 1e-14) break;
        }
        zeros.push_back(z);
    }
    return zeros;
}

} // namespace detail

// Panel breakpoints {0, z_1, z_2, ...} covering [0, upper]; the z_j are the
// zeros of kappa, so each panel carries half an oscillation.
inline std::vector<double> kappa_panel_breaks(double upper) {
    std::vector<double> breaks{0.0};
    std::size_t n = static_cast<std::size_t>(upper / pi) + 4;
    const auto& zeros = detail::kappa_zeros(n);
    for (double z : zeros) {
        breaks.push_back(z);
        if (z >= upper) break;
    }
    while (breaks.back() < upper) {
        n += 16;
        const auto& more = detail::kappa_zeros(n);
        breaks.push_back(more[breaks.size() - 1]);
    }
    return breaks;
}

// Jackson kernel, frequency side. Piecewise cubic supported on [-1,1].
inline double jackson_ell(double eta) {
    const double a = std::abs(eta);
    if (a > 1.0) throw domain_error("jackson_ell: |eta| must be <= 1");
    const double c = 1.0 - a;
    if (a <= 0.5) {
        const double b = 1.0 - 2.0 * a;
        return -4.0 / 3.0 * b * b * b + 8.0 / 3.0 * c * c * c;
    }
    return 8.0 / 3.0 * c * c * c;
}

// Jackson kernel, space side: (sin(y/4)/(y/4))^4, nonnegative.
inline double jackson_K(double y) {
    const double u = 0.25 * y;
    double s;
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        s = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    } else {
        s = std::sin(u) / u;
    }
    const double s2 = s * s;
    return s2 * s2;
}

// int_{-1}^{1} ell(eta) e^{-i eta y} d eta, evaluated by panelwise Gauss
// quadrature (ell is even, so this is real).
inline double jackson_ell_fourier(double y) {
    const double ay = std::abs(y);
    const int sub = 1 + static_cast<int>(ay / 6.0);
    auto half = [&](double a, double b) {
        double s = 0.0;
        for (int i = 0; i < sub; ++i) {
            const double lo = a + (b - a) * i / sub;
            const double hi = a + (b - a) * (i + 1) / sub;
            s += gl_integrate([&](double eta) { return jackson_ell(eta) * std::cos(eta * y); }, lo, hi, 16);
        }
        return s;
    };
    return 2.0 * (half(0.0, 0.5) + half(0.5, 1.0));
}

// Free resolvent kernel in R^3: e^{-sqrt(lambda) r} / (4 pi r).
inline double free_green(double lambda, double r) {
    if (!(r > 0.0)) throw domain_error("free_green: r must be > 0");
    if (!(lambda > 0.0)) throw domain_error("free_green: lambda must be > 0");
    return std::exp(-std::sqrt(lambda) * r) / (4.0 * pi * r);
}

// d/dlambda of the torus Green's function on the diagonal, by the method of
// images:  -(1/(8 pi sqrt(lambda))) * sum_{k in (L Z)^3} e^{-sqrt(lambda)|k|}.
// The lattice sum is accumulated over cubic shells |n|^2 = m and truncated
// once a full shell contributes less than tol * current sum.
inline double torus_dlambda_green(double lambda, double L, double tol = 1e-13) {
    if (!(lambda > 0.0) || !(L > 0.0)) throw domain_error("torus_dlambda_green: lambda, L > 0");
    const double sl = std::sqrt(lambda);
    double sum = 1.0; // n = 0
    int quiet = 0;
    for (int m = 1; m < 40000 && quiet < 3; ++m) {
        int r3 = 0;
        const int nmax = static_cast<int>(std::sqrt(static_cast<double>(m))) + 1;
        for (int nx = -nmax; nx <= nmax; ++nx)
            for (int ny = -nmax; ny <= nmax; ++ny) {
                const int rem = m - nx * nx - ny * ny;
                if (rem < 0) continue;
                const int nz = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rem))));
                if (nz * nz == rem) r3 += (nz == 0) ? 1 : 2;
            }
        const double shell = r3 * std::exp(-sl * L * std::sqrt(static_cast<double>(m)));
        sum += shell;
        quiet = (shell < tol * sum) ? quiet + 1 : 0;
    }
    return -sum / (8.0 * pi * sl);
}

// int_0^infty t^{3/2} (t+lambda)^{-3} dt evaluated numerically; equals
// 3 pi / (8 sqrt(lambda)). The substitution t = lambda tan^2(theta)
// compactifies the range.
inline double stieltjes_moment_quadrature(double lambda, int gl_order = 64) {
    if (!(lambda > 0.0)) throw domain_error("stieltjes_moment_quadrature: lambda > 0");
    const double integral = gl_integrate(
        [](double th) {
            const double s = std::sin(th);
            return s * s * s * s;
        },
        0.0, 0.5 * pi, gl_order);
    return 2.0 / std::sqrt(lambda) * integral;
}

// Residual of the Stieltjes weight identity
//   e^{-s sqrt(t)} / sqrt(t) = int_0^infty lambda^{3/2} kappa(s sqrt(lambda)) (t+lambda)^{-3} dlambda.
// In u = s sqrt(lambda) the right side is int_0^infty 2 s u^4 kappa(u) (s^2 t + u^2)^{-3} du;
// panels between consecutive zeros of kappa alternate and the tail is Euler-accelerated.
inline double stieltjes_weight_residual(double s, double t, const QuadratureSpec& q = {}) {
    if (!(s > 0.0) || !(t > 0.0)) throw domain_error("stieltjes_weight_residual: s, t > 0");
    q.validate();
    const double st = s * s * t;
    const double closed = std::exp(-s * std::sqrt(t)) / std::sqrt(t);
    const double abs_tol = 0.02 * q.rel_tol * closed;

    auto f = [&](double u) {
        const double d = st + u * u;
        return 2.0 * s * u * u * u * u * kappa(u) / (d * d * d);
    };

    const auto breaks = kappa_panel_breaks(q.r_max);
    std::vector<double> partial;
    partial.reserve(breaks.size());
    double acc = 0.0;
    double last_panel = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        // the first few panels may contain the sharp peak at u ~ s sqrt(t)
        const double panel = (breaks[i] < 4.0 * std::sqrt(st) + 1.0)
                                 ? adaptive_simpson(f, breaks[i], breaks[i + 1], 0.01 * abs_tol)
                                 : gl_integrate(f, breaks[i], breaks[i + 1], q.panels >= 16 ? 16 : q.panels);
        acc += panel;
        partial.push_back(acc);
        last_panel = std::abs(panel);
        // panels alternate in sign once past the denominator scale, so the
        // remainder is bounded by the last panel
        if (i > 8 && breaks[i + 1] > 4.0 * std::sqrt(st) && last_panel < abs_tol) break;
    }
    const double value = euler_accelerate(partial);
    const double residual = std::abs(value - closed);
    if (last_panel > 0.5 * q.rel_tol * closed)
        throw quadrature_error("stieltjes_weight_residual: truncation remainder " + std::to_string(last_panel) +
                               " exceeds requested tolerance; achieved residual " + std::to_string(residual));
    return residual;
}

} // namespace weyl
