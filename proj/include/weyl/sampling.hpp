#pragma once

// Bridge between computed spectra and the sampled-function transforms.

#include <cmath>

#include "weyl/spectral.hpp"
#include "weyl/tauberian.hpp"

namespace weyl {

// Counting-density step samples of e(t,x): grid = {0} + unique eigenvalues,
// values = cumulative |phi_n(x)|^2. The grid is closed with a flat step out to
// the volume-matched cutoff, so that the power tail A(T)(t/T)^{3/2} continues
// with exactly the free density sqrt(t)/(4 pi^2) used by resolvent2_diag.
inline StepSamples density_step_samples(const Spectrum& s, const Vec3& x) {
    const auto w = mode_weights_at(s, x);
    StepSamples A;
    A.t.push_back(0.0);
    A.v.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += w[i];
        const double t = s.eigenvalues[i];
        if (t <= A.t.back() + 1e-9 * (1.0 + std::abs(t))) {
            A.v.back() = acc;
            if (t > A.t.back() && A.t.size() > 1) A.t.back() = t;
        } else {
            A.t.push_back(t);
            A.v.push_back(acc);
        }
    }
    const double anchor = std::max(tail_cutoff(s), A.t.back() * (1.0 + 1e-9));
    A.t.push_back(anchor);
    A.v.push_back(acc);
    return A;
}

// Counting function N(t) as step samples (torus: volume * density tail).
inline StepSamples counting_step_samples(const Spectrum& s) {
    StepSamples A;
    A.t.push_back(0.0);
    A.v.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += 1.0;
        const double t = s.eigenvalues[i];
        if (t <= A.t.back() + 1e-9 * (1.0 + std::abs(t))) {
            A.v.back() = acc;
            if (t > A.t.back() && A.t.size() > 1) A.t.back() = t;
        } else {
            A.t.push_back(t);
            A.v.push_back(acc);
        }
    }
    const double anchor = std::max(tail_cutoff(s), A.t.back() * (1.0 + 1e-9));
    A.t.push_back(anchor);
    A.v.push_back(acc);
    return A;
}

} // namespace weyl
