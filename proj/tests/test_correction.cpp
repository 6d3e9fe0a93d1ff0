#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "weyl/correction.hpp"

using namespace weyl;

namespace {

RadialKatoPotential pot(double gamma = 1.0, double eta = 0.5) {
    RadialKatoPotential V;
    V.gamma = gamma;
    V.eta = eta;
    V.center = {0, 0, 0};
    V.r_cut = 0.2;
    return V;
}

CorrectionParams par(std::size_t samples = 200000, int max_n = 2, std::uint64_t seed = 42) {
    CorrectionParams p;
    p.epsilon = 0.2;
    p.max_n = max_n;
    p.mc_samples = samples;
    p.seed = seed;
    return p;
}

const Torus3 torus{1.0};

} // namespace

TEST_CASE("xi at the origin matches the closed form") {
    // closed form: (1/pi^2) 2^(1-eta)/(3-eta) cos(pi eta/2)/(1-eta) Gamma(eta)
    CHECK(xi_eta_zero_closed(0.5) == Catch::Approx(0.1436697).epsilon(1e-6));
    CHECK(xi_eta_zero_closed(0.25) == Catch::Approx(0.2767).epsilon(1e-3));
    for (double eta : {0.25, 0.5, 0.75}) {
        const double quad = xi_eta(eta, 0.0);
        CHECK(quad == Catch::Approx(xi_eta_zero_closed(eta)).epsilon(1e-6));
    }
}

TEST_CASE("xi far field approaches 1/(2 pi^2)") {
    const double limit = 1.0 / (2.0 * pi * pi);
    CHECK(limit == Catch::Approx(0.0506606).epsilon(1e-5));
    for (double eta : {0.25, 0.5, 0.75}) {
        const double s = 50.0;
        const double v = std::pow(s, 2.0 - eta) * xi_eta(eta, s);
        CHECK(v == Catch::Approx(limit).epsilon(0.05));
    }
}

TEST_CASE("xi positive and decreasing") {
    for (double eta : {0.25, 0.5, 0.75}) {
        double prev = xi_eta(eta, 0.0);
        CHECK(prev > 0.0);
        for (int i = 1; i <= 20; ++i) {
            const double s = 50.0 * i / 20.0;
            const double v = xi_eta(eta, s);
            CHECK(v > 0.0);
            CHECK(v < prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("truncation index N_q") {
    CHECK(n_q(2.0) == 3);
    CHECK(n_q(3.0) == 2);
    CHECK(n_q(6.0) == 1);
    CHECK(n_q(1.6) == 9);
    CHECK_THROWS_AS(n_q(1.5), domain_error);
    CHECK_THROWS_AS(n_q(0.3), domain_error);
}

TEST_CASE("r0n exact zeros") {
    auto V = pot();
    auto p = par(10000);
    // gamma = 0
    auto z1 = r0n_estimate(1, 100.0, {0.1, 0, 0}, pot(0.0), p, torus);
    CHECK(z1.mean == 0.0);
    CHECK(z1.stderr_ == 0.0);
    // support: d(x, x0) > eps + r_cut kills n = 1 exactly
    auto z2 = r0n_estimate(1, 100.0, {0.45, 0.0, 0.0}, V, p, torus);
    CHECK(z2.mean == 0.0);
    CHECK_THROWS_AS(r0n_estimate(0, 100.0, {0, 0, 0}, V, p, torus), domain_error);
}

TEST_CASE("r0n determinism under fixed seed") {
    auto V = pot();
    auto p = par(50000);
    const auto a = r0n_estimate(1, 100.0, V.center, V, p, torus);
    const auto b = r0n_estimate(1, 100.0, V.center, V, p, torus);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("r0n Monte Carlo agrees with the radial oracle at the singularity") {
    auto V = pot();
    auto p = par(400000);
    for (double t : {100.0, 1000.0}) {
        const auto mc = r0n_estimate(1, t, V.center, V, p, torus);
        const double exact = oracle::r1_radial(t, V, p.epsilon);
        INFO("t=" << t << " mc=" << mc.mean << " oracle=" << exact << " sigma=" << mc.stderr_);
        CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.stderr_);
        CHECK(mc.stderr_ < 0.05 * std::abs(exact));
    }
}

TEST_CASE("r0 series contracts and matches its leading order") {
    auto V = pot();
    auto p = par(200000);
    auto res = r0_series(100.0, V.center, V, p, torus);
    REQUIRE(res.orders.size() == 2);
    // contraction, and the order ratio shrinks like t^(-eta/2) as t grows
    const double ratio100 = std::abs(res.orders[1].mean) / std::abs(res.orders[0].mean);
    CHECK(ratio100 < 1.0);
    auto res16 = r0_series(1600.0, V.center, V, p, torus);
    const double ratio1600 = std::abs(res16.orders[1].mean) / std::abs(res16.orders[0].mean);
    CHECK(ratio1600 < 0.75 * ratio100); // (1600/100)^(-1/4) = 0.5
    const double exact1 = oracle::r1_radial(100.0, V, p.epsilon);
    CHECK(std::abs(res.value - exact1) <=
          3.0 * res.stderr_ + std::abs(res.orders[1].mean) + res.tail_bound);
    // sign at the singularity: positive for gamma > 0
    CHECK(res.value > 0.0);

    // n = 2 Monte Carlo agrees with the deterministic bipolar-coordinate value
    const double r2_exact = oracle::r2_bipolar(100.0, V, p.epsilon);
    CHECK(std::abs(res.orders[1].mean - r2_exact) <= 3.0 * res.orders[1].stderr_ + 0.01 * std::abs(r2_exact));

    auto zero = r0_series(100.0, V.center, pot(0.0), p, torus);
    CHECK(zero.value == 0.0);
    CHECK(zero.tail_bound == 0.0);

    // far outside the correction's support the series vanishes identically
    auto far = r0_series(100.0, {0.5, 0.5, 0.5}, V, par(10000), torus);
    CHECK(far.value == 0.0);

    // non-contracting regime refuses
    CHECK_THROWS_AS(r0_series(100.0, V.center, pot(80.0), par(20000), torus), convergence_error);
}

TEST_CASE("scaling profile check") {
    auto V = pot();
    auto p = par(400000);
    auto c = scaling_profile_check(0.5, {0, 0, 0}, 1e4, V, p, torus);
    CHECK(c.ratio == Catch::Approx(1.0).margin(0.1));
    CHECK(c.lhs_stderr < 0.03 * std::abs(c.rhs));

    // ratio is exactly independent of gamma at n = 1 (same chains, linear weights)
    auto c2 = scaling_profile_check(0.5, {0, 0, 0}, 1e4, pot(2.0), p, torus);
    CHECK(c2.ratio == Catch::Approx(c.ratio).epsilon(1e-12));

    auto cz = scaling_profile_check(0.5, {0, 0, 0}, 1e4, pot(0.0), p, torus);
    CHECK(cz.lhs == 0.0);
    CHECK(cz.rhs == 0.0);
}

TEST_CASE("rodnianski-schlag bound") {
    auto V = pot();
    const double eps = 0.2;
    // n = 1, coincident endpoints at the singularity: lhs = 2 int |V|/d -> equality
    auto c1 = rs_bound_check(1, V, eps, V.center, V.center, 400000, 7, torus);
    CHECK(c1.lhs.mean <= c1.rhs + 3.0 * c1.lhs.stderr_);
    CHECK(c1.lhs.mean == Catch::Approx(c1.rhs).epsilon(0.05));
    // n = 2
    auto c2 = rs_bound_check(2, V, eps, V.center, V.center, 400000, 7, torus);
    CHECK(c2.lhs.mean <= c2.rhs + 3.0 * c2.lhs.stderr_);
    // gamma = 0: 0 <= 0
    auto c0 = rs_bound_check(1, pot(0.0), eps, V.center, V.center, 10000, 7, torus);
    CHECK(c0.lhs.mean == 0.0);
    CHECK(c0.rhs == 0.0);
}

TEST_CASE("variation bound with a stable fitted constant") {
    auto V = pot();
    const double eps = 0.2;
    const double kato = kato_norm(V, eps, default_probe_set(V), torus).value;
    auto fitted = [&](int grid) {
        double c5 = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double t = 50.0 * std::pow(40.0, double(i) / grid);
            const double tp = t * (1.0 + 2.0 / grid);
            const double lhs = std::abs(oracle::r1_radial(t, V, eps) - oracle::r1_radial(tp, V, eps));
            const double modulus = kato * (std::sqrt(tp) - std::sqrt(t)) / std::sqrt(t);
            c5 = std::max(c5, lhs / modulus);
        }
        return c5;
    };
    const double coarse = fitted(12), fine = fitted(24);
    CHECK(coarse > 0.0);
    CHECK(fine <= 2.0 * coarse);
    CHECK(coarse <= 2.0 * fine);
}

TEST_CASE("sharp-law mechanism: bounded potentials keep sqrt(t) r1 bounded") {
    auto V = pot();
    const double eps = 0.2;
    // genuine singularity: sqrt(t) r1 grows like t^((1-eta)/2)
    const double g1 = std::sqrt(1e2) * oracle::r1_radial(1e2, V, eps);
    const double g2 = std::sqrt(1e4) * oracle::r1_radial(1e4, V, eps);
    CHECK(g2 / g1 == Catch::Approx(std::pow(100.0, 0.25)).epsilon(0.25));
    // truncated singularity: ratio flattens towards a bounded profile
    const double b1 = std::sqrt(1e2) * oracle::r1_radial(1e2, V, eps, 0.05);
    const double b2 = std::sqrt(1e4) * oracle::r1_radial(1e4, V, eps, 0.05);
    CHECK(std::abs(b2 / b1) < 1.5);
}

TEST_CASE("corrected weyl prediction") {
    auto V = pot();
    auto p = par(200000);
    // V = 0: exactly the free term
    auto free0 = corrected_weyl(100.0, {0.3, 0.2, 0.1}, pot(0.0), p, torus);
    CHECK(free0.value == Catch::Approx(std::pow(100.0, 1.5) / (6 * pi * pi)).epsilon(1e-12));
    CHECK(free0.free_term == Catch::Approx(16.8869).epsilon(1e-4));
    // far from the singularity: free term again
    auto far = corrected_weyl(100.0, {0.5, 0.5, 0.5}, V, p, torus);
    CHECK(far.value == far.free_term);
    // at the singularity: free minus (1/2)(r1 - r2) t^(3/2), orders from the oracles
    auto at0 = corrected_weyl(100.0, V.center, V, p, torus);
    const double expected =
        at0.free_term -
        0.5 * 1000.0 * (oracle::r1_radial(100.0, V, p.epsilon) - oracle::r2_bipolar(100.0, V, p.epsilon));
    const double slack = 0.5 * 1000.0 * (3.0 * at0.series.stderr_) + 0.02 * std::abs(at0.correction);
    CHECK(std::abs(at0.value - expected) <= slack);
    CHECK(at0.correction > 0.0);
    CHECK(at0.value < at0.free_term);
    CHECK_THROWS_AS(corrected_weyl(0.0, V.center, V, p, torus), domain_error);
}

TEST_CASE("correction params validation") {
    auto V = pot();
    CorrectionParams p;
    p.epsilon = 0.3; // > r_cut
    CHECK_THROWS_AS(p.validate(V), domain_error);
    p.epsilon = 0.1;
    p.mc_samples = 100;
    CHECK_THROWS_AS(p.validate(V), domain_error);
    p.mc_samples = 10000;
    p.max_n = 0;
    CHECK_THROWS_AS(p.validate(V), domain_error);
}
