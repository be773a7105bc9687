#pragma once

#include <cmath>
#include <utility>

#include "berryoptics/model.hpp"
#include "berryoptics/quadrature.hpp"

namespace berryoptics {

enum class PhaseMethod {
    Quadrature,
    ClosedForm,
    WeakField,
    WindingSum,
    ODE,
    WKB,
    Perturbative
};

inline const char* to_string(PhaseMethod m) {
    switch (m) {
        case PhaseMethod::Quadrature: return "quadrature";
        case PhaseMethod::ClosedForm: return "closed";
        case PhaseMethod::WeakField: return "weakfield";
        case PhaseMethod::WindingSum: return "winding";
        case PhaseMethod::ODE: return "ode";
        case PhaseMethod::WKB: return "wkb";
        case PhaseMethod::Perturbative: return "perturbative";
    }
    return "?";
}

/// Dynamical phase beta (>= 0), geometric phase gamma (<= 0 for
/// omega_alpha > 0) and the assembled total phases of the ground and excited
/// states. Phases are unwrapped; use wrap_phase for a principal value.
struct PhaseResult {
    double beta = 0;
    double gamma = 0;
    double phi_g = 0;
    double phi_e = 0;
    PhaseMethod method = PhaseMethod::Quadrature;
    double est_error = 0;
};

/// Principal value in (-pi, pi].
inline double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

/// Total ground/excited phases from beta and gamma:
/// phi_g = beta sign(Delta) + gamma, phi_e = -phi_g - pi Theta(-Delta).
inline std::pair<double, double> total_phases(double beta, double gamma,
                                              double delta_sign) {
    if (!(beta >= 0)) throw DomainError("beta must be >= 0");
    if (delta_sign == 0) throw DomainError("delta_sign must be nonzero");
    const double phi_g = beta * (delta_sign > 0 ? 1.0 : -1.0) + gamma;
    const double phi_e = -phi_g - (delta_sign < 0 ? kPi : 0.0);
    return {phi_g, phi_e};
}

inline PhaseResult make_phase_result(double beta, double gamma,
                                     double delta_sign, PhaseMethod method,
                                     double est_error = 0) {
    PhaseResult r;
    r.beta = beta;
    r.gamma = gamma;
    std::tie(r.phi_g, r.phi_e) = total_phases(beta, gamma, delta_sign);
    r.method = method;
    r.est_error = est_error;
    return r;
}

/// gamma = (omega_alpha tau / 2) Int (1/sqrt(1 + a^2 f^2) - 1) dtheta
/// over the envelope window.
template <typename Scalar>
QuadratureResult<Scalar> geometric_phase_quadrature(
    const ZoneParameters<Scalar>& zone, Scalar tol = Scalar(1e-10)) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    const Scalar a2 = zone.a * zone.a;
    const auto& f = zone.envelope;
    const Scalar pref = zone.omega_alpha_tau / 2;
    QuadratureOptions opts;
    opts.abs_tol =
        static_cast<double>(tol / std::max(Scalar(1), std::abs(pref)));
    opts.rel_tol = static_cast<double>(tol);
    auto res = integrate_adaptive(
        [&](Scalar th) {
            const Scalar ft = f(th);
            return Scalar(1) / std::sqrt(Scalar(1) + a2 * ft * ft) - Scalar(1);
        },
        -f.half_window(), f.half_window(), opts);
    return {pref * res.value, std::abs(pref) * res.error_estimate,
            res.subdivisions};
}

/// beta = (|Delta| tau / 2) Int (sqrt(1 + a^2 f^2) - 1) dtheta.
template <typename Scalar>
QuadratureResult<Scalar> dynamical_phase_quadrature(
    const ZoneParameters<Scalar>& zone, Scalar tol = Scalar(1e-10)) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    const Scalar a2 = zone.a * zone.a;
    const auto& f = zone.envelope;
    const Scalar pref = zone.abs_delta_tau() / 2;
    QuadratureOptions opts;
    opts.abs_tol = static_cast<double>(tol / std::max(Scalar(1), pref));
    opts.rel_tol = static_cast<double>(tol);
    auto res = integrate_adaptive(
        [&](Scalar th) {
            const Scalar ft = f(th);
            const Scalar s = a2 * ft * ft;
            // sqrt(1+s)-1 without cancellation for small s
            return s / (std::sqrt(Scalar(1) + s) + Scalar(1));
        },
        -f.half_window(), f.half_window(), opts);
    return {pref * res.value, pref * res.error_estimate, res.subdivisions};
}

/// Closed-form geometric phase for the Eckart envelope:
/// gamma_E = -(omega_alpha tau / 2) ln(1 + a^2).
template <typename Scalar>
Scalar eckart_geometric_phase(Scalar a, Scalar omega_alpha_tau) {
    if (!(a >= 0)) throw DomainError("a must be >= 0");
    return -(omega_alpha_tau / 2) * std::log1p(a * a);
}

/// Closed-form dynamical phase for the Eckart envelope:
/// beta_E = |Delta| tau [a arctan(a) - ln(1 + a^2)/2].
template <typename Scalar>
Scalar eckart_dynamical_phase(Scalar a, Scalar delta_tau_abs) {
    if (!(a >= 0)) throw DomainError("a must be >= 0");
    if (!(delta_tau_abs > 0)) throw DomainError("delta_tau_abs must be > 0");
    return delta_tau_abs * (a * std::atan(a) - std::log1p(a * a) / 2);
}

struct WeakFieldPhases {
    double beta = 0;
    double gamma = 0;
    double envelope_sq_integral = 0;  // Int f^2 dtheta over the window
    bool a_in_range = true;           // a < 0.3 recommended
};

/// Weak-field limit: beta = |Delta|tau a^2/4 Int f^2, gamma the same with
/// -omega_alpha tau; their ratio is envelope-independent.
inline WeakFieldPhases weak_field_phases(const ZoneParameters<double>& zone,
                                         double tol = 1e-12) {
    const auto& f = zone.envelope;
    QuadratureOptions opts;
    opts.abs_tol = opts.rel_tol = tol;
    auto i2 = integrate_adaptive(
        [&](double th) {
            const double ft = f(th);
            return ft * ft;
        },
        -f.half_window(), f.half_window(), opts);
    WeakFieldPhases w;
    w.envelope_sq_integral = i2.value;
    const double a2 = zone.a * zone.a;
    w.beta = 0.25 * zone.abs_delta_tau() * a2 * i2.value;
    w.gamma = -0.25 * zone.omega_alpha_tau * a2 * i2.value;
    w.a_in_range = zone.a < 0.3;
    return w;
}

struct KramersKronigCheck {
    double lhs_gamma = 0;  // gamma by quadrature
    double rhs = 0;        // omega_alpha * d(beta)/d|Delta| by central difference
    double discrepancy = 0;
};

/// Checks gamma = omega_alpha d(beta)/d|Delta| at fixed Rabi frequency
/// (a is recomputed as |Delta| varies). h is the step in |Delta| tau.
inline KramersKronigCheck kramers_kronig_check(const ZoneParameters<double>& zone,
                                               double h) {
    if (!(h >= 1e-6 && h <= 1e-2))
        throw DomainError("kramers_kronig_check: h must lie in [1e-6, 1e-2]");
    // Tight tolerance so the finite-difference truncation dominates.
    const double tol = 1e-13;
    const double d0 = zone.abs_delta_tau();
    if (!(d0 - h > 0)) throw DomainError("kramers_kronig_check: |Delta|tau <= h");
    auto beta_at = [&](double dt) {
        auto z = ZoneParameters<double>::make(dt, zone.omega_alpha_tau,
                                              zone.rabi_tau, zone.envelope);
        return dynamical_phase_quadrature(z, tol).value;
    };
    KramersKronigCheck r;
    r.lhs_gamma = geometric_phase_quadrature(zone, tol).value;
    r.rhs = zone.omega_alpha_tau * (beta_at(d0 + h) - beta_at(d0 - h)) / (2 * h);
    r.discrepancy = std::abs(r.lhs_gamma - r.rhs);
    return r;
}

/// Two consecutive zones with opposite detunings and matched Rabi profiles:
/// the dynamical phases cancel and the geometric phases add.
inline PhaseResult two_zone_total(const ZoneParameters<double>& blue,
                                  const ZoneParameters<double>& red,
                                  double tol = 1e-10) {
    const double scale = std::abs(blue.delta_tau);
    if (std::abs(red.delta_tau + blue.delta_tau) > 1e-12 * scale)
        throw DomainError("two_zone_total: detunings must be opposite");
    if (std::abs(red.rabi_tau - blue.rabi_tau) >
        1e-12 * std::max(1.0, blue.rabi_tau))
        throw DomainError("two_zone_total: Rabi profiles must match");

    const auto g1 = geometric_phase_quadrature(blue, tol);
    const auto g2 = geometric_phase_quadrature(red, tol);
    PhaseResult r;
    r.beta = 0;  // cancels by construction
    r.gamma = g1.value + g2.value;
    r.phi_g = r.gamma;
    r.phi_e = -r.phi_g - kPi;  // exactly one zone is red-detuned
    r.method = PhaseMethod::Quadrature;
    r.est_error = g1.error_estimate + g2.error_estimate;
    return r;
}

}  // namespace berryoptics
