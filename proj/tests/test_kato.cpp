#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "weyl/potential.hpp"

using namespace weyl;

namespace {

RadialKatoPotential make_pot(double gamma = 1.0, double eta = 0.5, double r_cut = 0.2,
                             Cutoff c = Cutoff::smooth) {
    RadialKatoPotential V;
    V.gamma = gamma;
    V.eta = eta;
    V.center = {0.0, 0.0, 0.0};
    V.r_cut = r_cut;
    V.cutoff = c;
    return V;
}

} // namespace

TEST_CASE("cutoff profile shape") {
    CHECK(cutoff_profile(0.0) == 1.0);
    CHECK(cutoff_profile(0.5) == 1.0);
    CHECK(cutoff_profile(1.0) == 0.0);
    CHECK(cutoff_profile(2.5) == 0.0);
    CHECK(cutoff_profile(0.75) == Catch::Approx(0.5).epsilon(1e-12)); // smoothstep midpoint
    double prev = 1.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = cutoff_profile(i / 100.0);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        prev = v;
    }
    // C^2 at the knots: second differences stay small across u = 1/2 and u = 1
    const double h = 1e-4;
    for (double knot : {0.5, 1.0}) {
        const double d2l = (cutoff_profile(knot - h) - 2 * cutoff_profile(knot - 2 * h) + cutoff_profile(knot - 3 * h)) / (h * h);
        const double d2r = (cutoff_profile(knot + 3 * h) - 2 * cutoff_profile(knot + 2 * h) + cutoff_profile(knot + h)) / (h * h);
        CHECK(std::abs(d2r - d2l) < 0.5); // continuous curvature, no jump of O(1/h)
    }
}

TEST_CASE("eval potential") {
    auto V = make_pot();
    const Torus3 torus{1.0};
    const double d = V.r_cut / 4.0; // chi == 1 there
    CHECK(eval_potential(V, {d, 0, 0}, torus) == Catch::Approx(std::pow(d, -1.5)).epsilon(1e-13));
    CHECK(eval_potential(V, {0.3, 0, 0}, torus) == 0.0); // d >= r_cut
    CHECK(eval_potential(make_pot(0.0), {d, 0, 0}, torus) == 0.0);
    // min-image distance
    CHECK(eval_potential(V, {0.95, 0, 0}, torus) == Catch::Approx(std::pow(0.05, -1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(eval_potential(V, {0, 0, 0}, torus), domain_error);
}

TEST_CASE("kato norm closed form") {
    CHECK(kato_norm_radial_closed(1.0, 0.5, 0.1, 0.2) == Catch::Approx(8.0 * pi * std::sqrt(0.1)).epsilon(1e-13));
    CHECK(kato_norm_radial_closed(1.0, 0.5, 0.1, 0.2) == Catch::Approx(7.9477).epsilon(1e-4));
    CHECK(kato_norm_radial_closed(2.0, 0.25, 0.01, 0.02) == Catch::Approx(8.0 * pi * std::pow(0.01, 0.25) / 0.25).epsilon(1e-13));
    CHECK(kato_norm_radial_closed(2.0, 0.25, 0.01, 0.02) == Catch::Approx(31.79).epsilon(1e-3));
    // eta -> 1 limit approaches 4 pi r
    CHECK(kato_norm_radial_closed(1.0, 0.999, 0.05, 0.2) == Catch::Approx(4.0 * pi * 0.05).epsilon(5e-3));
    CHECK_THROWS_AS(kato_norm_radial_closed(1.0, 0.5, 0.15, 0.2), domain_error);
}

TEST_CASE("kato norm quadrature agrees with closed form at the center") {
    auto V = make_pot();
    const Torus3 torus{1.0};
    auto probes = default_probe_set(V, 24);
    for (double r : {0.02, 0.05, 0.1}) {
        auto res = kato_norm(V, r, probes, torus);
        CHECK(res.value == Catch::Approx(kato_norm_radial_closed(1.0, 0.5, r, 0.2)).epsilon(1e-8));
        // radially decreasing |V|: sup at the singular center
        CHECK((res.argmax - V.center).norm() < 1e-12);
    }
}

TEST_CASE("kato norm off-center probe continuity") {
    auto V = make_pot();
    const Torus3 torus{1.0};
    const double r = 0.1;
    // a probe at offset delta sees the center value minus the delta^eta cusp
    //   I(delta) = 4 pi W(r) - 4 pi delta^eta / (eta (1+eta)) + O(delta)
    const double delta = 1e-4;
    auto near = kato_norm(V, r, {{delta, 0, 0}}, torus);
    const double cusp = 4.0 * pi * std::pow(delta, V.eta) / (V.eta * (1.0 + V.eta));
    CHECK(near.value == Catch::Approx(kato_norm_radial_closed(1.0, 0.5, r, 0.2) - cusp).epsilon(1e-6));
    // distant probe sees nothing
    auto far = kato_norm(V, r, {{0.45, 0.45, 0.0}}, torus);
    CHECK(far.value == 0.0);
    // off-center value matches a brute-force spherical-shell oracle; the
    // angular integral is desingularized at c = 1 by 1 - c = w^4
    const Vec3 probe{0.06, 0.0, 0.0};
    auto mid = kato_norm(V, r, {probe}, torus);
    auto angular = [&](double s) {
        return gl_integrate(
            [&](double w) {
                const double c = 1.0 - w * w * w * w;
                const double rho = std::sqrt(std::max(1e-300, 0.06 * 0.06 + s * s - 2.0 * 0.06 * s * c));
                const double f = (rho < V.r_cut) ? V.chi(rho) * std::pow(rho, V.eta - 2.0) : 0.0;
                return f * 4.0 * w * w * w;
            },
            0.0, std::pow(2.0, 0.25), 64);
    };
    double brute = 0.0;
    const int ns = 2000;
    for (int i = 0; i < ns; ++i) {
        const double s = r * (i + 0.5) / ns;
        brute += 2.0 * pi * s * angular(s) * (r / ns);
    }
    CHECK(mid.value == Catch::Approx(brute).epsilon(2e-3));
}

TEST_CASE("kato norm invariants") {
    auto V = make_pot();
    const Torus3 torus{1.0};
    auto probes = default_probe_set(V, 16);
    // monotone nondecreasing in r, vanishing at rate r^eta
    double prev = 0.0;
    for (double r : {0.0125, 0.025, 0.05, 0.1, 0.2}) {
        auto res = kato_norm(V, r, probes, torus);
        CHECK(res.value >= prev - 1e-14);
        prev = res.value;
    }
    const double v1 = kato_norm(V, 0.02, probes, torus).value;
    const double v2 = kato_norm(V, 0.04, probes, torus).value;
    CHECK(v2 / v1 == Catch::Approx(std::pow(2.0, V.eta)).epsilon(1e-6));
    // linear in |gamma|
    auto V2 = make_pot(2.0);
    CHECK(kato_norm(V2, 0.05, probes, torus).value ==
          Catch::Approx(2.0 * kato_norm(V, 0.05, probes, torus).value).epsilon(1e-12));
    CHECK(kato_norm(make_pot(0.0), 0.05, probes, torus).value == 0.0);
    CHECK_THROWS_AS(kato_norm(V, 0.05, {}, torus), domain_error);
    CHECK_THROWS_AS(kato_norm(V, 0.4, probes, torus), domain_error); // r + r_cut > L/2
}

TEST_CASE("fourier coefficients") {
    const double L = 1.0;
    auto Vind = make_pot(1.0, 0.5, 0.2, Cutoff::indicator);
    // m = 0 with indicator cutoff: 4 pi r_cut^(1+eta) / ((1+eta) L^3)
    const auto c0 = fourier_coeff(Vind, {0, 0, 0}, L);
    CHECK(c0.real() == Catch::Approx(4.0 * pi * std::pow(0.2, 1.5) / 1.5).epsilon(1e-10));
    CHECK(c0.imag() == Catch::Approx(0.0).margin(1e-15));

    // hermitian symmetry for an off-center potential
    auto V = make_pot();
    V.center = {0.31, 0.17, 0.53};
    const auto cp = fourier_coeff(V, {2, -1, 3}, L);
    const auto cm = fourier_coeff(V, {-2, 1, -3}, L);
    CHECK(cp.real() == Catch::Approx(cm.real()).margin(1e-15));
    CHECK(cp.imag() == Catch::Approx(-cm.imag()).margin(1e-15));

    // radial transform matches a plain adaptive quadrature of the 1-D integrand
    auto Vs = make_pot();
    for (double q : {3.0, 25.0, 120.0}) {
        const double direct = 4.0 * pi *
                              adaptive_simpson(
                                  [&](double r) {
                                      if (r == 0.0) return 0.0;
                                      return cutoff_profile(r / Vs.r_cut) * std::pow(r, Vs.eta) * std::sin(q * r) / (q * r);
                                  },
                                  0.0, Vs.r_cut, 1e-12);
        CHECK(radial_sinc_transform(Vs, q) == Catch::Approx(direct).margin(1e-8));
    }

    // |coeff(m)| decays like |m|^(-1-eta): limit constant from the sine moment
    const double limit = 4.0 * pi * std::tgamma(Vs.eta) * std::sin(pi * Vs.eta / 2.0) *
                         std::pow(2.0 * pi / L, -1.0 - Vs.eta) / (L * L * L);
    for (int k : {12, 17, 24, 34, 48}) {
        const double mag = std::abs(fourier_coeff(Vs, {k, 0, 0}, L));
        const double ratio = mag * std::pow(static_cast<double>(k), 1.0 + Vs.eta) / limit;
        CHECK(ratio > 0.5);
        CHECK(ratio < 1.5);
    }

    CHECK(std::abs(fourier_coeff(make_pot(0.0), {1, 1, 0}, L)) == 0.0);
    auto Vbig = make_pot(1.0, 0.5, 0.6);
    CHECK_THROWS_AS(fourier_coeff(Vbig, {0, 0, 0}, L), domain_error);
}

TEST_CASE("lq norms") {
    auto Vind = make_pot(1.0, 0.5, 0.2, Cutoff::indicator);
    // q = 1 indicator oracle: 4 pi r_cut^1.5 / 1.5
    CHECK(lq_norm(Vind, 1.0) == Catch::Approx(4.0 * pi * std::pow(0.2, 1.5) / 1.5).epsilon(1e-10));
    CHECK(lq_norm(make_pot(0.0), 1.0) == 0.0);
    auto V = make_pot();
    CHECK(lq_norm(make_pot(2.0), 1.3) == Catch::Approx(2.0 * lq_norm(V, 1.3)).epsilon(1e-12));
    // finite below the threshold 3/(2-eta) = 2, divergent at and above it
    CHECK(std::isfinite(lq_norm(V, 1.5)));
    CHECK(std::isfinite(lq_norm(V, 1.9)));
    CHECK(lq_norm(V, 1.5) < lq_norm(V, 1.9) * 1e6);
    CHECK_THROWS_AS(lq_norm(V, 2.0), domain_error);
    CHECK_THROWS_AS(lq_norm(V, 6.0), domain_error);

    // divergence is visible as unbounded growth under radial grid refinement
    auto riemann = [&](int n) {
        double s = 0.0;
        const double q = 2.3;
        for (int i = 1; i <= n; ++i) {
            const double rho = V.r_cut * (i - 0.5) / n;
            s += std::pow(std::abs(V.radial(rho)), q) * 4.0 * pi * rho * rho * (V.r_cut / n);
        }
        return s;
    };
    const double s1 = riemann(2000), s2 = riemann(8000), s3 = riemann(32000);
    CHECK(s2 > 1.3 * s1);
    CHECK(s3 > 1.3 * s2);
}

TEST_CASE("grid potential") {
    const Torus3 torus{1.0};
    const double eta = 0.5, r_cut = 0.2, d0 = 0.06;
    // bounded truncation of the radial singularity: midpoint sums converge
    auto vb = [&](double d) {
        return d < r_cut ? cutoff_profile(d / r_cut) * std::pow(std::max(d, d0), eta - 2.0) : 0.0;
    };
    auto fill = [&](int n) {
        GridPotential G;
        G.n1 = G.n2 = G.n3 = n;
        G.box = 1.0;
        G.periodic = true;
        G.values.resize(static_cast<std::size_t>(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    G.values[(static_cast<std::size_t>(i) * n + j) * n + k] =
                        vb(torus.distance(G.cell_center(i, j, k), {0, 0, 0}));
        return G;
    };
    const double r = 0.1;
    // radial oracle: 4 pi int_0^r vb(rho) rho drho
    const double exact = 4.0 * pi * adaptive_simpson([&](double rho) { return vb(rho) * rho; }, 0.0, r, 1e-12);
    auto res = kato_norm(fill(64), r, {{0.0, 0.0, 0.0}});
    CHECK(res.value == Catch::Approx(exact).epsilon(0.08));

    // genuinely singular data underestimates but improves under refinement
    auto vs = [&](double d) { return (d > 0 && d < r_cut) ? cutoff_profile(d / r_cut) * std::pow(d, eta - 2.0) : 0.0; };
    auto fill_singular = [&](int n) {
        GridPotential G;
        G.n1 = G.n2 = G.n3 = n;
        G.box = 1.0;
        G.periodic = true;
        G.values.resize(static_cast<std::size_t>(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    G.values[(static_cast<std::size_t>(i) * n + j) * n + k] =
                        vs(torus.distance(G.cell_center(i, j, k), {0, 0, 0}));
        return G;
    };
    const double full = kato_norm_radial_closed(1.0, eta, r, r_cut);
    const double coarse = kato_norm(fill_singular(24), r, {{0.0, 0.0, 0.0}}).value;
    const double fine = kato_norm(fill_singular(48), r, {{0.0, 0.0, 0.0}}).value;
    CHECK(coarse < full);
    CHECK(fine < full);
    CHECK(fine > coarse);

    GridPotential bad;
    bad.n1 = bad.n2 = bad.n3 = 2;
    bad.values = {1, 2, 3};
    CHECK_THROWS_AS(bad.validate(), domain_error);
}
