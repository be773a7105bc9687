#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "berryoptics/model.hpp"

namespace berryoptics {

/// Transverse Gaussian packet in the focusing description: initial width
/// Delta x_0, imprinted quadratic-phase strength b, and spreading time
/// t_s = M Delta x_0^2 / hbar.
struct GaussianPacket {
    double width0 = 1.0;
    double b = 0.0;
    double t_s = 1.0;

    void validate() const {
        if (!(width0 > 0)) throw DomainError("width0 must be > 0");
        if (!(t_s > 0)) throw DomainError("t_s must be > 0");
    }
};

/// Width of the freely evolving packet after a quadratic phase imprint:
/// Delta x(t) = Delta x_0 sqrt((1 - b t/t_s)^2 + (t/t_s)^2); b = 0 is free
/// spreading.
inline double analytic_width(double t, const GaussianPacket& p) {
    p.validate();
    if (!(t >= 0)) throw DomainError("analytic_width: t must be >= 0");
    const double u = t / p.t_s;
    return p.width0 * std::hypot(1.0 - p.b * u, u);
}

/// Minimal width Delta x_0/sqrt(1+b^2) reached at t = b t_s/(1+b^2). For
/// b <= 0 the width is nondecreasing, so the minimum sits at t = 0.
inline std::pair<double, double> min_width(const GaussianPacket& p) {
    p.validate();
    if (p.b <= 0) return {p.width0, 0.0};
    const double denom = 1.0 + p.b * p.b;
    return {p.width0 / std::sqrt(denom), p.b * p.t_s / denom};
}

/// Quadratic-phase curvature b = n_zones omega_alpha tau (Omega_0/Delta)^2
/// (k Delta x_0 cos(alpha))^2 imprinted near a node of the standing wave.
inline double quadratic_b(const ZoneParameters<double>& zone, double k_dx0,
                          double alpha, int n_zones) {
    if (!(k_dx0 > 0)) throw DomainError("quadratic_b: k_dx0 must be > 0");
    if (n_zones != 1 && n_zones != 2)
        throw DomainError("quadratic_b: n_zones must be 1 or 2");
    const double r = zone.rabi_tau / zone.abs_delta_tau();  // Omega_0/|Delta|
    const double kc = k_dx0 * std::cos(alpha);
    return n_zones * zone.omega_alpha_tau * r * r * kc * kc;
}

/// gamma(x) = -n_zones (omega_alpha tau/2) ln(1 + a(x)^2) with
/// a(x) = (Omega_0/|Delta|) |sin(k x cos alpha)|; x is passed premultiplied as
/// u = x/dx0 and the wavenumber as k_dx0 cos(alpha). `zone.rabi_tau` holds the
/// antinode value Omega_0 tau.
inline Eigen::ArrayXd berry_phase_profile(const ZoneParameters<double>& zone,
                                          const Eigen::ArrayXd& x_over_dx0,
                                          double k_dx0_cos_alpha, int n_zones) {
    if (n_zones != 1 && n_zones != 2)
        throw DomainError("berry_phase_profile: n_zones must be 1 or 2");
    const double r = zone.rabi_tau / zone.abs_delta_tau();
    const Eigen::ArrayXd s = (k_dx0_cos_alpha * x_over_dx0).sin() * r;
    return -n_zones * (zone.omega_alpha_tau / 2) * (1.0 + s.square()).log();
}

/// Uniform transverse grid of complex amplitudes, normalized to
/// sum |amps|^2 dx = 1.
struct SampledPacket {
    Eigen::ArrayXd grid;   // symmetric about 0, uniform spacing
    Eigen::ArrayXcd amps;
    double dx = 0;

    double norm() const { return (amps.abs2().sum()) * dx; }
};

/// Gaussian ground-state packet |Psi|^2 ~ exp(-x^2/width0^2) on a grid wide
/// enough that the edge amplitude is < 1e-8 of the peak (>= 8 sigma always).
inline SampledPacket make_gaussian_packet(double width0, int n = 4096,
                                          double half_width = 0) {
    if (!(width0 > 0)) throw DomainError("width0 must be > 0");
    if (n < 16) throw DomainError("grid too small");
    if (half_width <= 0) half_width = 10.0 * width0;
    half_width = std::max(half_width, 8.0 * width0);
    SampledPacket p;
    p.grid = Eigen::ArrayXd::LinSpaced(n, -half_width,
                                       half_width * (1.0 - 2.0 / n));
    p.dx = 2 * half_width / n;
    const double norm = 1.0 / std::sqrt(std::sqrt(kPi) * width0);
    p.amps = (norm * (-p.grid.square() / (2 * width0 * width0)).exp())
                 .cast<std::complex<double>>();
    return p;
}

inline void check_normalized(const SampledPacket& p, double tol = 1e-6) {
    if (p.grid.size() != p.amps.size() || p.grid.size() < 2 || !(p.dx > 0))
        throw DomainError("packet grid/amps mismatch");
    if (std::abs(p.norm() - 1.0) > tol)
        throw DomainError("packet is not normalized");
}

/// rms width calibrated so the initial Gaussian returns width0:
/// width = sqrt(2 <x^2> - 2 <x>^2) of |Psi|^2.
inline double measure_width(const SampledPacket& p) {
    check_normalized(p);
    const Eigen::ArrayXd w = p.amps.abs2();
    const double total = w.sum();
    const double mean = (p.grid * w).sum() / total;
    const double var = ((p.grid - mean).square() * w).sum() / total;
    return std::sqrt(2.0 * var);
}

/// Free Schroedinger evolution over time t, spectral form of the Fresnel
/// propagator: multiply by exp(-i (hbar/M) k^2 t / 2) in momentum space.
/// Throws AliasingError when the packet has significant weight at the edge of
/// the resolved momentum band.
inline SampledPacket propagate_free(const SampledPacket& p, double t,
                                    double hbar_over_mass) {
    check_normalized(p, 1e-6);
    if (!(t >= 0)) throw DomainError("propagate_free: t must be >= 0");
    if (!(hbar_over_mass > 0))
        throw DomainError("propagate_free: hbar_over_mass must be > 0");
    const int n = static_cast<int>(p.grid.size());

    std::vector<std::complex<double>> buf(p.amps.data(), p.amps.data() + n);
    std::vector<std::complex<double>> spec(static_cast<size_t>(n));
    Eigen::FFT<double> fft;
    fft.fwd(spec, buf);

    // Nyquist check: spectral content at the band edge must be negligible.
    double peak = 0, edge = 0;
    const int guard = std::max(1, n / 64);
    for (int j = 0; j < n; ++j) {
        const double m = std::abs(spec[static_cast<size_t>(j)]);
        peak = std::max(peak, m);
        const int dist = std::min(std::abs(j - n / 2), std::abs(j - n / 2 + 1));
        if (dist < guard) edge = std::max(edge, m);
    }
    if (edge > 1e-8 * peak)
        throw AliasingError(
            "propagate_free: grid too coarse for the imprinted phase "
            "(spectral weight at the Nyquist edge)");

    const double dk = 2 * kPi / (n * p.dx);
    for (int j = 0; j < n; ++j) {
        const int jj = j < (n + 1) / 2 ? j : j - n;
        const double k = dk * jj;
        spec[static_cast<size_t>(j)] *=
            std::polar(1.0, -0.5 * hbar_over_mass * k * k * t);
    }
    fft.inv(buf, spec);

    SampledPacket out;
    out.grid = p.grid;
    out.dx = p.dx;
    out.amps = Eigen::Map<Eigen::ArrayXcd>(buf.data(), n);
    return out;
}

/// Direct Fresnel-kernel quadrature of the same evolution; O(n^2), meant for
/// cross-validation on small grids.
inline SampledPacket propagate_free_reference(const SampledPacket& p, double t,
                                              double hbar_over_mass) {
    check_normalized(p, 1e-6);
    if (!(t >= 0)) throw DomainError("propagate_free_reference: t must be >= 0");
    if (t == 0) return p;
    const int n = static_cast<int>(p.grid.size());
    const double ht = hbar_over_mass * t;
    const std::complex<double> pref =
        std::polar(1.0 / std::sqrt(2 * kPi * ht), -kPi / 4);
    SampledPacket out;
    out.grid = p.grid;
    out.dx = p.dx;
    out.amps.resize(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> acc = 0;
        for (int j = 0; j < n; ++j) {
            const double d = p.grid[i] - p.grid[j];
            acc += std::polar(1.0, d * d / (2 * ht)) * p.amps[j];
        }
        out.amps[i] = pref * acc * p.dx;
    }
    return out;
}

}  // namespace berryoptics
