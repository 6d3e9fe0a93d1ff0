#pragma once

// The correction term of the perturbed pointwise Weyl law: Monte-Carlo
// evaluation of the n-fold chain integrals r0^(n,V), their alternating series,
// the limiting profile Xi_eta, the L^q truncation index N_q and the
// Rodnianski-Schlag chain bound.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/geometry.hpp"
#include "weyl/kernels.hpp"
#include "weyl/parallel.hpp"
#include "weyl/potential.hpp"
#include "weyl/quadrature.hpp"

namespace weyl {

struct CorrectionParams {
    double epsilon = 0.2;          // locality radius of the chain links
    int max_n = 2;                 // series truncation order
    std::size_t mc_samples = 100000; // samples per order
    std::uint64_t seed = 1;

    void validate(const RadialKatoPotential& V) const {
        if (!(epsilon > 0.0 && epsilon <= V.r_cut))
            throw domain_error("CorrectionParams: 0 < epsilon <= r_cut");
        if (max_n < 1) throw domain_error("CorrectionParams: max_n >= 1");
        if (mc_samples < 10000) throw domain_error("CorrectionParams: mc_samples >= 1e4");
    }
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
    bool low_confidence = false;
};

namespace detail {

struct RunningMoments {
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;

    void push(double v) {
        ++count;
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }
    void merge(const RunningMoments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
        mean += d * static_cast<double>(o.count) / total;
        count += o.count;
    }
    MCEstimate estimate() const {
        MCEstimate e;
        e.n_samples = count;
        e.mean = mean;
        if (count > 1) e.stderr_ = std::sqrt(m2 / (static_cast<double>(count) * (static_cast<double>(count) - 1.0)));
        e.low_confidence = e.stderr_ > std::abs(e.mean);
        return e;
    }
};

inline Vec3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v{g(rng), g(rng), g(rng)};
    double n = v.norm();
    while (n < 1e-12) {
        v = {g(rng), g(rng), g(rng)};
        n = v.norm();
    }
    return v * (1.0 / n);
}

// One chain link: sample z around prev from the defensive mixture
//   1/2 link kernel   (radius = eps * sqrt(u), cancels the 1/d link factor)
//   1/2 potential kernel (radius = R * u^(1/eta) around the singular center,
//                         cancels the d^(eta-2) potential factor; the combined
//                         volume density ~ d^(eta-3) also covers the
//                         coincident-center pattern)
// and return the mixture density at z. The potential component is skipped
// when its ball cannot meet the link ball.
struct ChainSampler {
    const RadialKatoPotential& V;
    const Torus3& geom;
    double epsilon;

    double link_pdf(double d) const {
        if (d >= epsilon || d <= 0.0) return 0.0;
        return 1.0 / (2.0 * pi * epsilon * epsilon * d);
    }
    double pot_pdf(double dc, double R) const {
        if (dc >= R || dc <= 0.0) return 0.0;
        return V.eta * std::pow(dc, V.eta - 3.0) / (4.0 * pi * std::pow(R, V.eta));
    }

    // prev -> (z, pdf). pdf is the density actually used for z.
    std::pair<Vec3, double> next(const Vec3& prev, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double dc_prev = geom.distance(prev, V.center);
        const bool mix = dc_prev < V.r_cut + epsilon;
        const double R = std::min(dc_prev + epsilon, V.r_cut);
        Vec3 z;
        if (mix && uni(rng) < 0.5) {
            const double r = R * std::pow(uni(rng), 1.0 / V.eta);
            z = geom.wrap(V.center + random_direction(rng) * r);
        } else {
            const double r = epsilon * std::sqrt(uni(rng));
            z = geom.wrap(prev + random_direction(rng) * r);
        }
        const double dlink = geom.distance(z, prev);
        const double dcent = geom.distance(z, V.center);
        const double pdf = mix ? 0.5 * link_pdf(dlink) + 0.5 * pot_pdf(dcent, R) : link_pdf(dlink);
        return {z, pdf};
    }
};

} // namespace detail

// Monte-Carlo estimate of r0^(n,V)(t,x): the n-fold integral of
//   kappa(sqrt(t) D) * D * prod_j [chi(d_j/eps)/d_j] * prod_j V(z_j)
// over chains x -> z_1 -> ... -> z_n -> x, prefactor 1/(2 (4 pi)^(n+1));
// D is the exact sum of the chain link lengths, flat-torus distances.
inline MCEstimate r0n_estimate(int n, double t, const Vec3& x, const RadialKatoPotential& V,
                               const CorrectionParams& params, const Torus3& geom) {
    if (n < 1) throw domain_error("r0n_estimate: n >= 1");
    if (t < 0.0) throw domain_error("r0n_estimate: t >= 0");
    V.validate();
    params.validate(V);

    MCEstimate zero;
    zero.n_samples = params.mc_samples;
    if (V.gamma == 0.0) return zero;
    // support: each link is < epsilon, the potential support has radius r_cut
    if (geom.distance(x, V.center) >= n * params.epsilon + V.r_cut) return zero;

    const double pref = 0.5 * std::pow(4.0 * pi, -(n + 1));
    const double sqrt_t = std::sqrt(t);
    const detail::ChainSampler sampler{V, geom, params.epsilon};

    const std::size_t chunk = 16384;
    const std::size_t nchunks = (params.mc_samples + chunk - 1) / chunk;
    std::vector<detail::RunningMoments> parts(nchunks);

    parallel_blocks(nchunks, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            std::seed_seq seq{params.seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(0xC0FFEE)};
            std::mt19937_64 rng(seq);
            const std::size_t count = std::min(chunk, params.mc_samples - c * chunk);
            auto& mom = parts[c];
            for (std::size_t i = 0; i < count; ++i) {
                double w = pref;
                double D = 0.0;
                Vec3 prev = x;
                bool dead = false;
                for (int j = 1; j <= n; ++j) {
                    const auto [z, pdf] = sampler.next(prev, rng);
                    const double dlink = geom.distance(prev, z);
                    const double chi = (dlink < params.epsilon && dlink > 0.0)
                                           ? cutoff_profile(dlink / params.epsilon, V.cutoff)
                                           : 0.0;
                    if (chi == 0.0 || pdf <= 0.0) {
                        dead = true;
                        break;
                    }
                    const double dcent = geom.distance(z, V.center);
                    const double v = (dcent > 0.0 && dcent < V.r_cut) ? V.radial(dcent) : 0.0;
                    if (v == 0.0) {
                        dead = true;
                        break;
                    }
                    w *= chi / dlink * v / pdf;
                    D += dlink;
                    prev = z;
                }
                if (dead) {
                    mom.push(0.0);
                    continue;
                }
                const double dlast = geom.distance(prev, x);
                const double chil = (dlast < params.epsilon && dlast > 0.0)
                                        ? cutoff_profile(dlast / params.epsilon, V.cutoff)
                                        : 0.0;
                if (chil == 0.0) {
                    mom.push(0.0);
                    continue;
                }
                D += dlast;
                w *= chil / dlast * kappa(sqrt_t * D) * D;
                mom.push(w);
            }
        }
    });

    detail::RunningMoments total;
    for (const auto& p : parts) total.merge(p);
    return total.estimate();
}

struct SeriesResult {
    double value = 0.0;       // alternating partial sum to max_n
    double stderr_ = 0.0;     // combined MC standard error
    double tail_bound = 0.0;  // geometric tail estimate from the observed ratio
    std::vector<MCEstimate> orders;
    bool low_confidence = false;
};

// r0^V(t,x) = sum_{n>=1} (-1)^(n+1) r0^(n,V)(t,x), truncated at max_n with a
// geometric tail estimate. Refuses when the computed orders do not contract.
inline SeriesResult r0_series(double t, const Vec3& x, const RadialKatoPotential& V,
                              const CorrectionParams& params, const Torus3& geom) {
    SeriesResult res;
    for (int n = 1; n <= params.max_n; ++n)
        res.orders.push_back(r0n_estimate(n, t, x, V, params, geom));

    double ratio = 0.0;
    for (std::size_t i = 0; i + 1 < res.orders.size(); ++i) {
        const double a = std::abs(res.orders[i].mean);
        const double b = std::abs(res.orders[i + 1].mean);
        if (a == 0.0 && b == 0.0) continue;
        // contraction must hold beyond the MC noise
        if (b > a + 3.0 * (res.orders[i].stderr_ + res.orders[i + 1].stderr_))
            throw convergence_error("r0_series: orders do not contract; decrease epsilon or |gamma|");
        if (a > 0.0) ratio = std::max(ratio, std::min(b / a, 0.9));
    }
    double sign = 1.0;
    double var = 0.0;
    for (const auto& o : res.orders) {
        res.value += sign * o.mean;
        var += o.stderr_ * o.stderr_;
        sign = -sign;
        res.low_confidence = res.low_confidence || o.low_confidence;
    }
    res.stderr_ = std::sqrt(var);
    const double last = std::abs(res.orders.back().mean);
    res.tail_bound = (ratio > 0.0) ? last * ratio / (1.0 - ratio) : 0.0;
    return res;
}

// Limiting profile Xi_eta(y), evaluated through the 1-D reduction
//   Xi_eta(s) = 2^-eta/(16 pi eta s) int_0^inf kappa(r) [(r+2s)^eta - |r-2s|^eta] dr
// and, at s = 0,
//   Xi_eta(0) = 2^-eta/(4 pi) int_0^inf kappa(r) r^(eta-1) dr.
// Panels run between consecutive zeros of kappa (split at the |r-2s| kink);
// the alternating panel series is Euler-accelerated.
inline double xi_eta(double eta, double s, const QuadratureSpec& q = {}) {
    if (!(eta > 0.0 && eta < 1.0)) throw domain_error("xi_eta: eta in (0,1)");
    if (s < 0.0) throw domain_error("xi_eta: s >= 0");
    q.validate();

    const double upper = std::max(q.r_max, 4.0 * s + 200.0);
    auto breaks = kappa_panel_breaks(upper);
    const bool at_origin = s < 1e-12;
    if (!at_origin) {
        // insert the kink of |r - 2s|^eta
        const double kink = 2.0 * s;
        auto it = std::lower_bound(breaks.begin(), breaks.end(), kink);
        if (it != breaks.end() && std::abs(*it - kink) > 1e-12) breaks.insert(it, kink);
    }

    auto integrand = [&](double r) {
        if (at_origin) return kappa(r) * std::pow(r, eta - 1.0);
        return kappa(r) * (std::pow(r + 2.0 * s, eta) - std::pow(std::abs(r - 2.0 * s), eta));
    };

    std::vector<double> partial;
    partial.reserve(breaks.size());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double panel;
        if (i == 0 && at_origin) {
            // desingularize r^(eta-1) by r = w^(1/eta)
            const double wend = std::pow(breaks[1], eta);
            panel = gl_integrate([&](double w) { return kappa(std::pow(w, 1.0 / eta)) / eta; }, 0.0, wend, 32);
        } else {
            panel = gl_integrate(integrand, breaks[i], breaks[i + 1], 16);
        }
        acc += panel;
        partial.push_back(acc);
    }
    const double integral = euler_accelerate(partial);
    const double check = euler_accelerate(partial, 16);
    const double err_est = std::abs(integral - check);

    double value;
    if (at_origin)
        value = std::pow(2.0, -eta) / (4.0 * pi) * integral;
    else
        value = std::pow(2.0, -eta) / (16.0 * pi * eta * s) * integral;
    if (err_est > 0.01 * std::abs(value) + 1e-13)
        throw quadrature_error("xi_eta: oscillatory tail not converged, error estimate " +
                               std::to_string(err_est));
    return value;
}

// Closed form for Xi_eta(0).
inline double xi_eta_zero_closed(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw domain_error("xi_eta_zero_closed: eta in (0,1)");
    return (1.0 / (pi * pi)) * std::pow(2.0, 1.0 - eta) / (3.0 - eta) * std::cos(pi * eta / 2.0) /
           (1.0 - eta) * std::tgamma(eta);
}

struct ScalingCheck {
    double lhs = 0.0;   // t^(eta/2) r0^(1,V)(t, x0 + y/sqrt(t))
    double rhs = 0.0;   // gamma * Xi_eta(|y|)
    double ratio = 0.0;
    double lhs_stderr = 0.0;
    bool low_confidence = false;
};

// Scaling limit of Prop. "t^(n eta/2) r0^(n)(t, y/sqrt t)" at n = 1.
inline ScalingCheck scaling_profile_check(double eta, const Vec3& y, double t,
                                          const RadialKatoPotential& V, const CorrectionParams& params,
                                          const Torus3& geom) {
    if (std::abs(eta - V.eta) > 1e-12) throw domain_error("scaling_profile_check: eta must match V.eta");
    const double st = std::sqrt(t);
    const Vec3 x = geom.wrap(V.center + y * (1.0 / st));
    if (geom.distance(x, V.center) > params.epsilon)
        throw domain_error("scaling_profile_check: y/sqrt(t) must lie within epsilon of the center");
    const auto est = r0n_estimate(1, t, x, V, params, geom);
    ScalingCheck c;
    c.lhs = std::pow(t, eta / 2.0) * est.mean;
    c.lhs_stderr = std::pow(t, eta / 2.0) * est.stderr_;
    c.rhs = V.gamma * xi_eta(eta, y.norm());
    c.ratio = (c.rhs != 0.0) ? c.lhs / c.rhs : (c.lhs == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN());
    c.low_confidence = est.low_confidence;
    return c;
}

// N_q = 1 + floor(q / (2q - 3)), the number of series orders that can exceed
// the O(t) remainder for V in L^q.
inline int n_q(double q) {
    if (!(q > 1.5)) throw domain_error("n_q: q > 3/2");
    return 1 + static_cast<int>(std::floor(q / (2.0 * q - 3.0) + 1e-9));
}

struct RsBoundCheck {
    MCEstimate lhs;
    double rhs = 0.0;
};

// Chain bound: sup over endpoints of
//   int_{links < eps} [prod |V(z_j)| / prod d(z_j, z_j+1)] sum_l d(z_l, z_l+1)
// is at most (n+1) ||V||_K(eps)^n. Left side estimated by MC at the given
// endpoints, right side assembled from the Kato norm.
inline RsBoundCheck rs_bound_check(int n, const RadialKatoPotential& V, double epsilon, const Vec3& x0,
                                   const Vec3& x_end, std::size_t samples, std::uint64_t seed,
                                   const Torus3& geom) {
    if (n < 1 || n > 2) throw domain_error("rs_bound_check: n in {1, 2} at desk scale");
    V.validate();
    if (!(epsilon > 0.0)) throw domain_error("rs_bound_check: epsilon > 0");

    RsBoundCheck out;
    const double kato = kato_norm(V, epsilon, default_probe_set(V), geom).value;
    out.rhs = (n + 1) * std::pow(kato, n);
    if (V.gamma == 0.0) {
        out.lhs.n_samples = samples;
        return out;
    }

    const detail::ChainSampler sampler{V, geom, epsilon};
    const std::size_t chunk = 16384;
    const std::size_t nchunks = (samples + chunk - 1) / chunk;
    std::vector<detail::RunningMoments> parts(nchunks);
    parallel_blocks(nchunks, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            std::seed_seq seq{seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(0x5B0D)};
            std::mt19937_64 rng(seq);
            const std::size_t count = std::min(chunk, samples - c * chunk);
            auto& mom = parts[c];
            for (std::size_t i = 0; i < count; ++i) {
                double w = 1.0;
                double D = 0.0;
                Vec3 prev = x0;
                bool dead = false;
                for (int j = 1; j <= n; ++j) {
                    const auto [z, pdf] = sampler.next(prev, rng);
                    const double dlink = geom.distance(prev, z);
                    if (dlink <= 0.0 || dlink >= epsilon || pdf <= 0.0) {
                        dead = true;
                        break;
                    }
                    const double dcent = geom.distance(z, V.center);
                    const double av = (dcent > 0.0 && dcent < V.r_cut) ? std::abs(V.radial(dcent)) : 0.0;
                    if (av == 0.0) {
                        dead = true;
                        break;
                    }
                    w *= av / (dlink * pdf);
                    D += dlink;
                    prev = z;
                }
                if (dead) {
                    mom.push(0.0);
                    continue;
                }
                const double dlast = geom.distance(prev, x_end);
                if (dlast <= 0.0 || dlast >= epsilon) {
                    mom.push(0.0);
                    continue;
                }
                D += dlast;
                mom.push(w * D / dlast);
            }
        }
    });
    detail::RunningMoments total;
    for (const auto& p : parts) total.merge(p);
    out.lhs = total.estimate();
    return out;
}

struct CorrectedWeyl {
    double free_term = 0.0;       // t^(3/2) / (6 pi^2)
    double correction = 0.0;      // r0^V(t,x) t^(3/2) / 2
    double value = 0.0;           // free_term - correction
    SeriesResult series;
};

// Corrected pointwise Weyl prediction t^(3/2)/(6 pi^2) - r0^V(t,x) t^(3/2)/2.
inline CorrectedWeyl corrected_weyl(double t, const Vec3& x, const RadialKatoPotential& V,
                                    const CorrectionParams& params, const Torus3& geom) {
    if (!(t > 0.0)) throw domain_error("corrected_weyl: t > 0");
    CorrectedWeyl out;
    out.free_term = std::pow(t, 1.5) / (6.0 * pi * pi);
    out.series = r0_series(t, x, V, params, geom);
    out.correction = 0.5 * out.series.value * std::pow(t, 1.5);
    out.value = out.free_term - out.correction;
    return out;
}

} // namespace weyl
