#pragma once

// Test-only reference numerics, deliberately independent of the library's
// adaptive quadrature: composite Simpson with Richardson refinement, and a
// brute-force monopole-flux sum over a disc in parameter space.

#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double lo,
                      double hi, int n /*even*/) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Simpson refined until two doublings agree to `tol` (relative).
inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, double tol = 1e-12) {
    int n = 512;
    double prev = simpson(f, lo, hi, n);
    for (int it = 0; it < 12; ++it) {
        n *= 2;
        const double cur = simpson(f, lo, hi, n);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur)))
            return cur + (cur - prev) / 15.0;
        prev = cur;
    }
    return prev;
}

/// Flux of the monopole field Z/(2 R^3) through the disc of radius `rho_max`
/// in the plane Z = 1, by midpoint double sum. The geometric phase of a
/// single circular turn is minus this flux.
inline double disc_flux(double rho_max, int n_r = 2000, int n_phi = 400) {
    const double dr = rho_max / n_r;
    const double dphi = 2.0 * M_PI / n_phi;
    double flux = 0;
    for (int i = 0; i < n_r; ++i) {
        const double r = (i + 0.5) * dr;
        const double field = 0.5 / std::pow(r * r + 1.0, 1.5);
        flux += field * r * dr * dphi * n_phi;
    }
    return flux;
}

}  // namespace oracles
