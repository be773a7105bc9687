#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "berryoptics/phases.hpp"

namespace berryoptics {

/// One point of the circuit traced in (X, Y, Z) parameter space, in units of
/// hbar |Delta|. The path rotates at the Doppler frequency while its radius
/// follows the envelope: X = rho cos(phi), Y = -rho sin(phi), Z = sign(Delta).
struct CircuitSample {
    double t;    // units of tau
    double phi;  // omega_alpha t
    double rho;  // a f(t)
    double X, Y, Z;
};

inline std::vector<CircuitSample> circuit_path(const ZoneParameters<double>& zone,
                                               int n_samples) {
    if (n_samples < 2) throw DomainError("circuit_path: n_samples must be >= 2");
    const double w = zone.envelope.half_window();
    std::vector<CircuitSample> out;
    out.reserve(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        CircuitSample s;
        s.t = -w + 2.0 * w * i / (n_samples - 1);
        s.phi = zone.omega_alpha_tau * s.t;
        s.rho = zone.a * zone.envelope(s.t);
        s.X = s.rho * std::cos(s.phi);
        s.Y = -s.rho * std::sin(s.phi);
        s.Z = zone.delta_sign();
        out.push_back(s);
    }
    return out;
}

/// Instantaneous eigenpair of the two-level Hamiltonian
/// H = (1/2) [[Z, X-iY], [X+iY, -Z]] with the phase convention that makes the
/// second component carry the circuit angle: |+> = (cos(T/2), sin(T/2) e^{i p}),
/// |-> = (-sin(T/2), cos(T/2) e^{i p}) with cos(T) = Z/R, e^{i p} = (X+iY)/rho.
/// At rho = 0 the states reduce to the bare atomic ones, including the -|e>
/// sign for Z < 0.
struct DressedDecomposition {
    double eps_plus;   // +R/2
    double eps_minus;  // -R/2
    Eigen::Vector2cd state_plus;   // components ordered (e, g)
    Eigen::Vector2cd state_minus;
};

inline DressedDecomposition dressed_states(double X, double Y, double Z) {
    const double rho = std::hypot(X, Y);
    const double R = std::hypot(rho, Z);
    if (R == 0) throw DomainError("dressed_states: degenerate point (0,0,0)");
    const double theta = std::atan2(rho, Z);  // in [0, pi]
    const std::complex<double> eip =
        rho > 0 ? std::complex<double>(X / rho, Y / rho)
                : std::complex<double>(1, 0);
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    DressedDecomposition d;
    d.eps_plus = R / 2;
    d.eps_minus = -R / 2;
    d.state_plus = Eigen::Vector2cd(c, s * eip);
    d.state_minus = Eigen::Vector2cd(-s, c * eip);
    return d;
}

namespace detail {

// ln F_m with F_m = sinh(th) + sqrt(cosh^2(th) + a^2), th = m pi / (w tau),
// in the overflow-free split th + g(e^{-2 th}). Only g survives in flux
// differences; written via log1p so it stays accurate down to the denormal
// range (g ~ a^2 u for small u).
template <typename Scalar>
Scalar winding_g(Scalar theta, Scalar a) {
    const Scalar u = std::exp(Scalar(-2) * theta);
    const Scalar p = (Scalar(1) + u) / 2;
    const Scalar root = std::sqrt(p * p + a * a * u);
    // (1-u)/2 + root = 1 + (a^2 u)/(root + p) exactly
    return std::log1p(a * a * u / (root + p));
}

}  // namespace detail

/// Flux-through-the-m-th-winding phase
/// gamma^(m) = omega_alpha tau (ln(F_m/F_{m-1}) - pi/(omega_alpha tau)),
/// evaluated in a cancellation-safe form valid for arbitrarily large m.
template <typename Scalar>
Scalar winding_phase(long m, Scalar a, Scalar omega_alpha_tau) {
    if (m < 1) throw DomainError("winding_phase: m must be >= 1");
    if (!(a >= 0)) throw DomainError("winding_phase: a must be >= 0");
    if (!(omega_alpha_tau > 0))
        throw DomainError("winding_phase: omega_alpha_tau must be > 0");
    const Scalar pi_w = Scalar(kPi) / omega_alpha_tau;
    // ln F_m - ln F_{m-1} - pi/w telescopes to g_m - g_{m-1}; the theta_m terms
    // cancel exactly, so nothing here can overflow.
    const Scalar gm = detail::winding_g(Scalar(m) * pi_w, a);
    const Scalar gm1 = detail::winding_g(Scalar(m - 1) * pi_w, a);
    return omega_alpha_tau * (gm - gm1);
}

template <typename Scalar>
struct WindingSumResult {
    Scalar partial_sum;         // telescoped sum of the first N fluxes
    Scalar extrapolated_limit;  // geometric tail estimate of the N -> inf limit
};

/// Partial winding sum by telescoping,
/// sum_{m=1..N} gamma^(m) = omega_alpha tau (ln F_N - ln F_0 - N pi / w tau),
/// plus a geometric-ratio extrapolation of the remaining tail.
template <typename Scalar>
WindingSumResult<Scalar> winding_sum(long N, Scalar a, Scalar omega_alpha_tau) {
    if (N < 1) throw DomainError("winding_sum: N must be >= 1");
    if (!(a >= 0)) throw DomainError("winding_sum: a must be >= 0");
    if (!(omega_alpha_tau > 0))
        throw DomainError("winding_sum: omega_alpha_tau must be > 0");
    const Scalar pi_w = Scalar(kPi) / omega_alpha_tau;
    const Scalar gN = detail::winding_g(Scalar(N) * pi_w, a);
    const Scalar g0 = detail::winding_g(Scalar(0), a);
    WindingSumResult<Scalar> r;
    r.partial_sum = omega_alpha_tau * (gN - g0);
    // Tail fluxes decay geometrically with ratio ~ e^{-2 pi / w tau}; estimate
    // the ratio from the last two terms and sum the geometric series.
    r.extrapolated_limit = r.partial_sum;
    if (N >= 2) {
        const Scalar last = winding_phase(N, a, omega_alpha_tau);
        const Scalar prev = winding_phase(N - 1, a, omega_alpha_tau);
        if (prev != Scalar(0)) {
            const Scalar q = last / prev;
            if (q > Scalar(0) && q < Scalar(1))
                r.extrapolated_limit += last * q / (Scalar(1) - q);
        }
    }
    return r;
}

/// Geometric phase as the explicit parameter-space flux integral: the radial
/// integral of the monopole field is done in closed form, the angular one
/// adaptively. Independent route to the same gamma as
/// geometric_phase_quadrature.
inline QuadratureResult<double> surface_flux_quadrature(
    const ZoneParameters<double>& zone, double tol = 1e-10) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    const double w = zone.omega_alpha_tau;
    const double phi_max = w * zone.envelope.half_window();
    if (phi_max == 0) return {0.0, 0.0, 0};
    QuadratureOptions opts;
    opts.abs_tol = 2 * tol;  // result is -1/2 of the raw integral
    opts.rel_tol = tol;
    auto res = integrate_adaptive(
        [&](double phi) {
            const double rho = zone.a * zone.envelope(phi / w);
            // Int_0^rho r dr/(1+r^2)^{3/2} = 1 - 1/sqrt(1+rho^2)
            const double s = rho * rho;
            return s / (std::sqrt(1.0 + s) * (1.0 + std::sqrt(1.0 + s)));
        },
        -phi_max, phi_max, opts);
    return {-0.5 * res.value, 0.5 * res.error_estimate, res.subdivisions};
}

}  // namespace berryoptics
