#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "weyl/kernels.hpp"

using namespace weyl;

TEST_CASE("kappa values") {
    // Taylor limit: sin z - z cos z = z^3/3 + O(z^5)
    CHECK(kappa(0.0) == Catch::Approx(8.0 / (3.0 * pi)).epsilon(1e-14));
    CHECK(kappa(pi) == Catch::Approx(8.0 / (pi * pi * pi)).epsilon(1e-14));
    const double k2 = (8.0 / pi) * (std::sin(2.0) - 2.0 * std::cos(2.0)) / 8.0;
    CHECK(kappa(2.0) == Catch::Approx(k2).epsilon(1e-14));
    CHECK(k2 == Catch::Approx(0.5543657).epsilon(1e-6));

    // series/direct agreement across the switch radius
    for (double z : {0.05, 0.09, 0.0999, 0.1001, 0.11, 0.5})
        CHECK(kappa(z) == Catch::Approx((8.0 / pi) * (std::sin(z) - z * std::cos(z)) / (z * z * z)).margin(1e-13));

    const std::complex<double> zc(0.3, 0.2);
    const auto kc = kappa(zc);
    const auto direct = (8.0 / pi) * (std::sin(zc) - zc * std::cos(zc)) / (zc * zc * zc);
    CHECK(std::abs(kc - direct) < 1e-13);
}

TEST_CASE("kappa bounds on a log grid") {
    // empirical constants from a dense pre-scan
    for (int i = 0; i < 1000; ++i) {
        const double r = std::pow(10.0, -3.0 + 6.0 * i / 999.0);
        const double k = kappa(r);
        CHECK(std::abs(k) <= 0.85);
        CHECK(r * std::abs(k) <= 1.2);
    }
}

TEST_CASE("kappa Lipschitz ratio u|kappa(rv)-kappa(ru)|/(v-u) <= 2") {
    for (int ir = 0; ir < 40; ++ir) {
        const double r = std::pow(10.0, -2.0 + 4.0 * ir / 39.0);
        for (int iu = 0; iu < 25; ++iu) {
            const double u = std::pow(10.0, -2.0 + 4.0 * iu / 24.0);
            for (double fac : {1.0001, 1.01, 1.5, 3.0}) {
                const double v = u * fac;
                const double ratio = u * std::abs(kappa(r * v) - kappa(r * u)) / (v - u);
                CHECK(ratio <= 2.0);
            }
        }
    }
}

TEST_CASE("kappa zeros breakpoints") {
    auto breaks = kappa_panel_breaks(50.0);
    REQUIRE(breaks.size() > 10);
    CHECK(breaks.front() == 0.0);
    CHECK(breaks[1] == Catch::Approx(4.493409457909064).epsilon(1e-10)); // first root of tan z = z
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        CHECK(std::abs(kappa(breaks[i])) < 1e-12);
        CHECK(breaks[i] > breaks[i - 1]);
    }
}

TEST_CASE("jackson ell") {
    CHECK(jackson_ell(0.0) == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(jackson_ell(1.0) == 0.0);
    CHECK(jackson_ell(-1.0) == 0.0);
    CHECK(jackson_ell(0.5) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(jackson_ell(-0.5) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(jackson_ell(1.2), domain_error);
    // 0 <= ell <= 4/3 on the whole interval
    for (int i = 0; i <= 200; ++i) {
        const double eta = -1.0 + 2.0 * i / 200.0;
        const double l = jackson_ell(eta);
        CHECK(l >= 0.0);
        CHECK(l <= 4.0 / 3.0 + 1e-15);
    }
}

TEST_CASE("jackson K") {
    CHECK(jackson_K(0.0) == 1.0);
    CHECK(jackson_K(2.0 * pi) == Catch::Approx(std::pow(2.0 / pi, 4)).epsilon(1e-13));
    CHECK(jackson_K(2.0 * pi) == Catch::Approx(0.1642557).epsilon(1e-5));
    CHECK(jackson_K(4.0 * pi) < 1e-25);      // isolated zero
    CHECK(jackson_K(4.0 * pi + 0.1) > 0.0);
    CHECK(jackson_K(-3.7) == jackson_K(3.7));
}

TEST_CASE("jackson kernel integral equals 8 pi / 3") {
    double integral = 0.0;
    for (int k = 0; k < 500; ++k)
        integral += gl_integrate([](double y) { return jackson_K(y); }, 4.0 * pi * k, 4.0 * pi * (k + 1), 16);
    integral *= 2.0;
    CHECK(integral == Catch::Approx(8.0 * pi / 3.0).margin(1e-6));

    // |y| K and y^2 K have finite integrals as well
    double iy = 0.0, iy2 = 0.0;
    for (int k = 0; k < 500; ++k) {
        iy += gl_integrate([](double y) { return std::abs(y) * jackson_K(y); }, 4.0 * pi * k, 4.0 * pi * (k + 1), 16);
        iy2 += gl_integrate([](double y) { return y * y * jackson_K(y); }, 4.0 * pi * k, 4.0 * pi * (k + 1), 16);
    }
    CHECK(std::isfinite(iy));
    CHECK(std::isfinite(iy2));
    CHECK(iy > 0.0);
    CHECK(iy2 > 0.0);
}

TEST_CASE("jackson Fourier pair") {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double y = 60.0 * i / 99.0;
        worst = std::max(worst, std::abs(jackson_ell_fourier(y) - jackson_K(y)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("free green") {
    CHECK(free_green(1.0, 1.0) == Catch::Approx(std::exp(-1.0) / (4.0 * pi)).epsilon(1e-14));
    CHECK(free_green(1.0, 1.0) == Catch::Approx(0.0292749).epsilon(1e-5));
    CHECK(free_green(4.0, 0.5) == Catch::Approx(std::exp(-1.0) / (2.0 * pi)).epsilon(1e-14));
    double prev = free_green(1.0, 0.7);
    for (double lam : {2.0, 5.0, 20.0, 100.0, 1e4}) {
        const double g = free_green(lam, 0.7);
        CHECK(g < prev);
        prev = g;
    }
    CHECK_THROWS_AS(free_green(1.0, 0.0), domain_error);
    CHECK_THROWS_AS(free_green(1.0, -2.0), domain_error);
}

TEST_CASE("torus dlambda green vs direct image enumeration") {
    // oracle: brute-force triple loop, no shell logic
    auto oracle = [](double lambda, double L, int R) {
        const double sl = std::sqrt(lambda);
        double sum = 0.0;
        for (int nx = -R; nx <= R; ++nx)
            for (int ny = -R; ny <= R; ++ny)
                for (int nz = -R; nz <= R; ++nz)
                    sum += std::exp(-sl * L * std::sqrt(double(nx * nx + ny * ny + nz * nz)));
        return -sum / (8.0 * pi * sl);
    };
    CHECK(torus_dlambda_green(100.0, 1.0) == Catch::Approx(oracle(100.0, 1.0, 8)).epsilon(1e-12));
    CHECK(torus_dlambda_green(100.0, 1.0) == Catch::Approx(-3.97999e-3).epsilon(3e-6));
    CHECK(torus_dlambda_green(25.0, 2.0) == Catch::Approx(oracle(25.0, 2.0, 8)).epsilon(1e-12));
    // L -> infinity: only k = 0 survives
    CHECK(torus_dlambda_green(100.0, 50.0) == Catch::Approx(-1.0 / (80.0 * pi)).epsilon(1e-14));
}

TEST_CASE("torus image residual decays like exp(-sqrt(lambda) L)") {
    // fit ln(8 pi sqrt(lambda) * residual) against sqrt(lambda); slope ~ -L
    std::vector<double> xs, ys;
    for (double lam : {49.0, 64.0, 81.0, 100.0, 121.0, 144.0}) {
        const double resid = -torus_dlambda_green(lam, 1.0) - 1.0 / (8.0 * pi * std::sqrt(lam));
        REQUIRE(resid > 0.0);
        xs.push_back(std::sqrt(lam));
        ys.push_back(std::log(8.0 * pi * std::sqrt(lam) * resid));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i) { sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("stieltjes moment identity") {
    for (double lam : {0.5, 1.0, 7.0, 100.0})
        CHECK(stieltjes_moment_quadrature(lam) == Catch::Approx(3.0 * pi / (8.0 * std::sqrt(lam))).margin(1e-10));
    CHECK(stieltjes_moment_quadrature(1.0) == Catch::Approx(1.1780972).epsilon(1e-7));
}

TEST_CASE("stieltjes weight identity residual") {
    QuadratureSpec q;
    q.rel_tol = 1e-7;
    const double c11 = std::exp(-1.0);
    CHECK(stieltjes_weight_residual(1.0, 1.0, q) < 1e-6 * c11);
    const double c24 = std::exp(-4.0) / 2.0;
    CHECK(stieltjes_weight_residual(2.0, 4.0, q) < 1e-6 * c24);
    CHECK_THROWS_AS(stieltjes_weight_residual(-1.0, 1.0, q), domain_error);
}
