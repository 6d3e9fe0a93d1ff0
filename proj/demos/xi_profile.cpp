// Tabulates the limiting spatial profile Xi_eta(s) of the singular correction
// term, together with its closed form at s = 0 and the far-field constant.
// Output: CSV on stdout.

#include <cstdio>

#include "weyl/correction.hpp"

using namespace weyl;

int main() {
    const double etas[] = {0.25, 0.5, 0.75};
    std::printf("# Xi_eta(0) closed forms:");
    for (double eta : etas) std::printf(" eta=%.2f: %.7f", eta, xi_eta_zero_closed(eta));
    std::printf("\n# far field: s^(2-eta) Xi_eta(s) -> 1/(2 pi^2) = %.7f\n", 1.0 / (2.0 * pi * pi));
    std::printf("s,xi_0.25,xi_0.5,xi_0.75\n");
    for (int i = 0; i <= 50; ++i) {
        const double s = 10.0 * i / 50.0;
        std::printf("%.3f", s);
        for (double eta : etas) std::printf(",%.8e", xi_eta(eta, s));
        std::printf("\n");
    }
    return 0;
}
