#pragma once

// Log-log remainder-exponent fits and the geometric window averaging that
// tames lattice-count oscillation before fitting.

#include <cmath>
#include <utility>
#include <vector>

#include "weyl/errors.hpp"

namespace weyl {

struct FitResult {
    double slope = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    double intercept = 0.0; // log-space intercept
    std::size_t n_points = 0;
};

// Least-squares slope of log|residual| against log t. Points with |residual|
// at or below the noise floor are dropped.
inline FitResult fit_remainder_exponent(const std::vector<double>& t, const std::vector<double>& resid,
                                        double noise_floor = 0.0) {
    if (t.size() != resid.size()) throw domain_error("fit_remainder_exponent: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) continue;
        const double a = std::abs(resid[i]);
        if (a <= noise_floor || a == 0.0) continue;
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(a));
    }
    if (xs.size() < 8) throw domain_error("fit_remainder_exponent: need >= 8 usable points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den <= 0.0) throw numeric_error("fit_remainder_exponent: degenerate abscissae");
    FitResult f;
    f.n_points = xs.size();
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += e * e;
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    if (xs.size() > 2) f.stderr_ = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));
    return f;
}

// Geometric windows [t, ratio*t]: mean of |residual| per window against the
// geometric-mean abscissa. Empty windows are skipped.
inline std::pair<std::vector<double>, std::vector<double>> window_average_abs(
    const std::vector<double>& t, const std::vector<double>& resid, double ratio = 1.2) {
    if (t.size() != resid.size()) throw domain_error("window_average_abs: size mismatch");
    if (!(ratio > 1.0)) throw domain_error("window_average_abs: ratio > 1");
    std::vector<double> wt, wr;
    if (t.empty()) return {wt, wr};
    double lo = t.front();
    std::size_t i = 0;
    while (i < t.size()) {
        const double hi = lo * ratio;
        double sum = 0.0, logsum = 0.0;
        std::size_t count = 0;
        while (i < t.size() && t[i] < hi) {
            sum += std::abs(resid[i]);
            logsum += std::log(t[i]);
            ++count;
            ++i;
        }
        if (count > 0) {
            wt.push_back(std::exp(logsum / static_cast<double>(count)));
            wr.push_back(sum / static_cast<double>(count));
        }
        lo = hi;
    }
    return {wt, wr};
}

// Coefficient in |residual| ~ coef * t^exponent with the exponent pinned:
// geometric mean of |residual| / t^exponent.
inline double pinned_coefficient(const std::vector<double>& t, const std::vector<double>& resid,
                                 double exponent) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = std::abs(resid[i]);
        if (a == 0.0 || !(t[i] > 0.0)) continue;
        acc += std::log(a / std::pow(t[i], exponent));
        ++n;
    }
    if (n == 0) throw domain_error("pinned_coefficient: no usable points");
    return std::exp(acc / static_cast<double>(n));
}

} // namespace weyl
