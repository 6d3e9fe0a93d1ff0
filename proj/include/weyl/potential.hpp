#pragma once

// Singular radial potentials gamma * chi(d/r_cut) * d^(eta-2), their Kato-class
// and L^q norms, and the radial Fourier transform used to assemble Hamiltonians.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/geometry.hpp"
#include "weyl/kernels.hpp"
#include "weyl/quadrature.hpp"

namespace weyl {

// Dimensionless cutoff profile chi: == 1 on [0,1/2], == 0 on [1,inf),
// monotone nonincreasing. The default descends with a quintic smoothstep,
// which is C^2 at both knots. The indicator variant is the closed-form
// oracle used in tests; it is not C^2.
enum class Cutoff { smooth, indicator };

inline double cutoff_profile(double u, Cutoff kind = Cutoff::smooth) {
    if (u < 0.0) u = -u;
    if (kind == Cutoff::indicator) return u < 1.0 ? 1.0 : 0.0;
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    const double w = 2.0 * (u - 0.5); // in (0,1)
    const double s = w * w * w * (10.0 + w * (-15.0 + 6.0 * w));
    return 1.0 - s;
}

struct RadialKatoPotential {
    double gamma = 0.0;  // coupling, energy * length^(2-eta)
    double eta = 0.5;    // singularity exponent in (0,1)
    Vec3 center{};       // location of the singularity
    double r_cut = 0.2;  // support radius of chi(d/r_cut)
    Cutoff cutoff = Cutoff::smooth;

    void validate() const {
        if (!(eta > 0.0 && eta < 1.0)) throw domain_error("RadialKatoPotential: eta in (0,1)");
        if (!(r_cut > 0.0)) throw domain_error("RadialKatoPotential: r_cut > 0");
    }

    double chi(double d) const { return cutoff_profile(d / r_cut, cutoff); }

    // Value at distance d from the center; unbounded at d = 0.
    double radial(double d) const {
        if (d >= r_cut) return 0.0;
        if (d <= 0.0) throw domain_error("RadialKatoPotential: evaluation at the singular center");
        return gamma * chi(d) * std::pow(d, eta - 2.0);
    }
};

inline double eval_potential(const RadialKatoPotential& V, const Vec3& x, const Torus3& geom) {
    if (V.gamma == 0.0) return 0.0;
    return V.radial(geom.distance(x, V.center));
}

inline double eval_potential(const RadialKatoPotential& V, const Vec3& x) {
    if (V.gamma == 0.0) return 0.0;
    return V.radial((x - V.center).norm());
}

namespace detail {

// W(b)  = int_0^b chi(rho/r_cut) rho^(eta-1) drho          (|gamma| = 1)
// Phi(b) = int_0^b W(tau) dtau
// Closed forms hold while chi == 1; the smoothstep region [r_cut/2, r_cut]
// is tabulated once on a fine grid.
class RadialCutoffTables {
public:
    RadialCutoffTables(double eta, double r_cut, Cutoff kind) : eta_(eta), rc_(r_cut), kind_(kind) {
        if (kind_ == Cutoff::indicator) {
            a_ = r_cut;
        } else {
            a_ = 0.5 * r_cut;
            const int n = 4096;
            gridW_.resize(n + 1);
            gridPhi_.resize(n + 1);
            h_ = (rc_ - a_) / n;
            gridW_[0] = std::pow(a_, eta_) / eta_;
            gridPhi_[0] = std::pow(a_, eta_ + 1.0) / (eta_ * (eta_ + 1.0));
            auto f = [&](double rho) { return cutoff_profile(rho / rc_, kind_) * std::pow(rho, eta_ - 1.0); };
            for (int i = 0; i < n; ++i) {
                const double lo = a_ + i * h_, hi = lo + h_;
                gridW_[i + 1] = gridW_[i] + gl_integrate(f, lo, hi, 8);
                gridPhi_[i + 1] = gridPhi_[i] + 0.5 * h_ * (gridW_[i] + gridW_[i + 1]) -
                                  h_ * h_ / 12.0 * (f(hi) - f(lo));
            }
        }
    }

    double W(double b) const {
        if (b <= 0.0) return 0.0;
        if (b <= a_) return std::pow(b, eta_) / eta_;
        if (kind_ == Cutoff::indicator || b >= rc_) return Wmax();
        return interp(gridW_, b);
    }

    double Phi(double b) const {
        if (b <= 0.0) return 0.0;
        if (b <= a_) return std::pow(b, eta_ + 1.0) / (eta_ * (eta_ + 1.0));
        if (kind_ == Cutoff::indicator) {
            const double c = std::min(b, rc_);
            double phi = std::pow(c, eta_ + 1.0) / (eta_ * (eta_ + 1.0));
            if (b > rc_) phi += (b - rc_) * Wmax();
            return phi;
        }
        if (b >= rc_) return gridPhi_.back() + (b - rc_) * Wmax();
        return interp(gridPhi_, b);
    }

    double Wmax() const {
        if (kind_ == Cutoff::indicator) return std::pow(rc_, eta_) / eta_;
        return gridW_.back();
    }

private:
    double interp(const std::vector<double>& g, double b) const {
        const double s = (b - a_) / h_;
        const std::size_t i = std::min(g.size() - 2, static_cast<std::size_t>(s));
        const double frac = s - static_cast<double>(i);
        return g[i] * (1.0 - frac) + g[i + 1] * frac;
    }

    double eta_, rc_, a_ = 0.0, h_ = 0.0;
    Cutoff kind_;
    std::vector<double> gridW_, gridPhi_;
};

} // namespace detail

// Analytic oracle for the Kato integral of the radial family at the center
// while chi == 1 there: 4 pi |gamma| r^eta / eta, valid for r <= r_cut / 2.
inline double kato_norm_radial_closed(double gamma, double eta, double r, double r_cut) {
    if (!(eta > 0.0 && eta < 1.0)) throw domain_error("kato_norm_radial_closed: eta in (0,1)");
    if (!(r > 0.0)) throw domain_error("kato_norm_radial_closed: r > 0");
    if (r > 0.5 * r_cut) throw domain_error("kato_norm_radial_closed: requires r <= r_cut/2 (chi varies beyond)");
    return 4.0 * pi * std::abs(gamma) * std::pow(r, eta) / eta;
}

struct KatoNormResult {
    double value = 0.0;
    Vec3 argmax{};
};

// sup over probe points x of  int_{d(x,y) < r} |V(y)| / d(x,y) dy.
// Each probe integral reduces to 1-D integrals of the cumulative radial
// weight: with delta = d(x, center),
//   I(delta) = (2 pi |gamma| / delta) * [ Phi(delta+r) - 2 Phi(delta)
//              + Phi(max(delta-r,0)) - (r > delta ? Phi(r-delta) : 0) ]
// and I(0) = 4 pi |gamma| W(r). Exact on the torus while r + r_cut <= L/2
// (at most one image of the support meets the probe ball).
inline KatoNormResult kato_norm(const RadialKatoPotential& V, double r, const std::vector<Vec3>& probes,
                                const Torus3& geom) {
    V.validate();
    if (!(r > 0.0)) throw domain_error("kato_norm: r > 0");
    if (probes.empty()) throw domain_error("kato_norm: empty probe set");
    if (r + V.r_cut > 0.5 * geom.L)
        throw domain_error("kato_norm: need r + r_cut <= L/2 for the single-image reduction");

    const detail::RadialCutoffTables tab(V.eta, V.r_cut, V.cutoff);
    const double ag = std::abs(V.gamma);
    KatoNormResult best;
    best.argmax = probes.front();
    for (const Vec3& x : probes) {
        const double delta = geom.distance(x, V.center);
        double val;
        if (delta < 1e-12) {
            val = 4.0 * pi * ag * tab.W(r);
        } else if (delta >= r + V.r_cut) {
            val = 0.0;
        } else {
            double s = tab.Phi(delta + r) - 2.0 * tab.Phi(delta) + tab.Phi(std::max(delta - r, 0.0));
            if (r > delta) s -= tab.Phi(r - delta);
            val = 2.0 * pi * ag / delta * s;
        }
        if (val > best.value) {
            best.value = val;
            best.argmax = x;
        }
    }
    return best;
}

// Default probe set: the singular center plus a low-discrepancy cloud in the
// support ball (for radially decreasing |V| the sup sits at the center; the
// cloud guards non-monotone inputs).
inline std::vector<Vec3> default_probe_set(const RadialKatoPotential& V, std::size_t cloud = 32) {
    std::vector<Vec3> probes{V.center};
    auto ball = halton_ball(cloud, V.center, V.r_cut);
    probes.insert(probes.end(), ball.begin(), ball.end());
    return probes;
}

// (int |V|^q)^(1/q) by radial quadrature; diverges for q >= 3/(2-eta).
inline double lq_norm(const RadialKatoPotential& V, double q) {
    V.validate();
    if (!(q > 0.0)) throw domain_error("lq_norm: q > 0");
    const double beta = (V.eta - 2.0) * q + 2.0;
    if (beta <= -1.0)
        throw domain_error("lq_norm: integral diverges for q >= 3/(2-eta)");
    if (V.gamma == 0.0) return 0.0;
    const double a = (V.cutoff == Cutoff::indicator) ? V.r_cut : 0.5 * V.r_cut;
    double radial = std::pow(a, beta + 1.0) / (beta + 1.0);
    if (a < V.r_cut)
        radial += adaptive_simpson(
            [&](double rho) { return std::pow(cutoff_profile(rho / V.r_cut, V.cutoff), q) * std::pow(rho, beta); },
            a, V.r_cut, 1e-13);
    return std::abs(V.gamma) * std::pow(4.0 * pi * radial, 1.0 / q);
}

namespace detail {

// int_0^X u^(eta-1) sin u du; panels of width pi, the first one desingularized
// by u = w^(1/eta).
inline double sin_moment(double eta, double X) {
    if (X <= 0.0) return 0.0;
    double acc = 0.0;
    const double first = std::min(X, pi);
    const double wend = std::pow(first, eta);
    acc += adaptive_simpson(
        [&](double w) { return std::sin(std::pow(w, 1.0 / eta)) / eta; }, 0.0, wend, 1e-13);
    for (double lo = pi; lo < X; lo += pi) {
        const double hi = std::min(lo + pi, X);
        acc += gl_integrate([&](double u) { return std::pow(u, eta - 1.0) * std::sin(u); }, lo, hi, 16);
    }
    return acc;
}

} // namespace detail

// Radial transform S(q) = 4 pi int_0^r_cut chi(r/r_cut) r^eta sinc(q r) dr.
inline double radial_sinc_transform(const RadialKatoPotential& V, double q) {
    const double a = (V.cutoff == Cutoff::indicator) ? V.r_cut : 0.5 * V.r_cut;
    double integral;
    if (q * V.r_cut < 1e-8) {
        integral = std::pow(a, 1.0 + V.eta) / (1.0 + V.eta);
        if (a < V.r_cut)
            integral += gl_integrate(
                [&](double r) { return cutoff_profile(r / V.r_cut, V.cutoff) * std::pow(r, V.eta); }, a, V.r_cut, 32);
        return 4.0 * pi * integral;
    }
    // inner region, chi == 1:  int_0^a r^eta sinc(qr) dr = q^(-1-eta) SinMoment(qa)
    integral = std::pow(q, -1.0 - V.eta) * detail::sin_moment(V.eta, q * a);
    if (a < V.r_cut) {
        // smooth outer region, pi-wide oscillation panels
        const int panels = 1 + static_cast<int>(q * (V.r_cut - a) / pi);
        for (int i = 0; i < panels; ++i) {
            const double lo = a + (V.r_cut - a) * i / panels;
            const double hi = a + (V.r_cut - a) * (i + 1) / panels;
            integral += gl_integrate(
                [&](double r) {
                    return cutoff_profile(r / V.r_cut, V.cutoff) * std::pow(r, V.eta) * std::sin(q * r) / (q * r);
                },
                lo, hi, 16);
        }
    }
    return 4.0 * pi * integral;
}

// Plane-wave matrix element (gamma / L^3) e^{-i q . x0} S(|q|), q = 2 pi m / L.
// Requires r_cut < L/2 so the torus integral reduces to one Euclidean ball.
inline std::complex<double> fourier_coeff(const RadialKatoPotential& V, const std::array<int, 3>& m, double L) {
    V.validate();
    if (!(V.r_cut < 0.5 * L)) throw domain_error("fourier_coeff: requires r_cut < L/2");
    if (V.gamma == 0.0) return {0.0, 0.0};
    const Vec3 q{2.0 * pi * m[0] / L, 2.0 * pi * m[1] / L, 2.0 * pi * m[2] / L};
    const double qn = q.norm();
    const double s = radial_sinc_transform(V, qn);
    const double phase = -q.dot(V.center);
    return V.gamma / (L * L * L) * s * std::complex<double>(std::cos(phase), std::sin(phase));
}

// Grid-sampled potential on a torus/cube:  escape hatch for non-radial input.
struct GridPotential {
    int n1 = 0, n2 = 0, n3 = 0;
    std::vector<double> values; // index ((i*n2)+j)*n3+k, cell centers
    bool periodic = true;
    double box = 1.0; // side length

    void validate() const {
        if (n1 <= 0 || n2 <= 0 || n3 <= 0) throw domain_error("GridPotential: positive dims");
        if (values.size() != static_cast<std::size_t>(n1) * n2 * n3)
            throw domain_error("GridPotential: sample count mismatch");
        for (double v : values)
            if (!std::isfinite(v)) throw domain_error("GridPotential: non-finite sample");
    }

    Vec3 cell_center(int i, int j, int k) const {
        return {(i + 0.5) * box / n1, (j + 0.5) * box / n2, (k + 0.5) * box / n3};
    }
};

// Kato integral for grid data: midpoint sum with the 1/d weight; the cell
// containing the probe uses the equal-volume ball value int_ball 1/d = 2 pi R^2.
inline KatoNormResult kato_norm(const GridPotential& V, double r, const std::vector<Vec3>& probes) {
    V.validate();
    if (!(r > 0.0)) throw domain_error("kato_norm: r > 0");
    if (probes.empty()) throw domain_error("kato_norm: empty probe set");
    const Torus3 torus{V.box};
    const double cell_vol = V.box * V.box * V.box / (static_cast<double>(V.n1) * V.n2 * V.n3);
    const double r_eq = std::cbrt(3.0 * cell_vol / (4.0 * pi));
    KatoNormResult best;
    best.argmax = probes.front();
    for (const Vec3& x : probes) {
        double acc = 0.0;
        for (int i = 0; i < V.n1; ++i)
            for (int j = 0; j < V.n2; ++j)
                for (int k = 0; k < V.n3; ++k) {
                    const Vec3 c = V.cell_center(i, j, k);
                    const double d = V.periodic ? torus.distance(x, c) : (x - c).norm();
                    if (d > r) continue;
                    const double av = std::abs(V.values[(static_cast<std::size_t>(i) * V.n2 + j) * V.n3 + k]);
                    acc += (d < r_eq) ? av * 2.0 * pi * r_eq * r_eq : av * cell_vol / d;
                }
        if (acc > best.value) {
            best.value = acc;
            best.argmax = x;
        }
    }
    return best;
}

} // namespace weyl
