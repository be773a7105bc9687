#pragma once

#include <cmath>
#include <optional>

#include "berryoptics/envelope.hpp"
#include "berryoptics/errors.hpp"

namespace berryoptics {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// One interaction zone in laboratory units. All angular frequencies in 1/s.
struct PhysicalSetup {
    double wavelength;        // m, > 0
    double velocity;          // m/s, >= 0 (longitudinal)
    double half_angle_alpha;  // rad, in (0, pi/2)
    double detuning;          // 1/s, signed, nonzero
    double rabi_peak;         // 1/s, >= 0 (antinode value Omega_0)
    double envelope_time;     // s, > 0 (tau)
    std::optional<double> spontaneous_rate;  // 1/s, >= 0
    std::optional<double> recoil_frequency;  // 1/s, >= 0

    double wavenumber() const { return 2.0 * kPi / wavelength; }

    void validate() const {
        if (!(wavelength > 0)) throw DomainError("wavelength must be > 0");
        if (!(velocity >= 0)) throw DomainError("velocity must be >= 0");
        if (!(half_angle_alpha > 0 && half_angle_alpha < kPi / 2))
            throw DomainError("half_angle_alpha must lie in (0, pi/2)");
        if (!(rabi_peak >= 0)) throw DomainError("rabi_peak must be >= 0");
        if (!(envelope_time > 0)) throw DomainError("envelope_time must be > 0");
        if (detuning == 0) throw DomainError("detuning must be nonzero");
        if (spontaneous_rate && !(*spontaneous_rate >= 0))
            throw DomainError("spontaneous_rate must be >= 0");
        if (recoil_frequency && !(*recoil_frequency >= 0))
            throw DomainError("recoil_frequency must be >= 0");
    }
};

/// Doppler rotation frequency k v sin(alpha) of the parameter-space circuit.
inline double doppler_frequency(double k, double v, double alpha) {
    if (!(k > 0)) throw DomainError("wavenumber must be > 0");
    if (!(v >= 0)) throw DomainError("velocity must be >= 0");
    if (!(alpha >= 0 && alpha < kPi / 2))
        throw DomainError("alpha must lie in [0, pi/2)");
    return k * v * std::sin(alpha);
}

/// Standing-wave Rabi frequency Omega_0 sin(k x cos(alpha)); sign retained.
inline double rabi_frequency(double omega0, double k, double alpha, double x) {
    if (!(omega0 >= 0)) throw DomainError("rabi_peak must be >= 0");
    return omega0 * std::sin(k * x * std::cos(alpha));
}

/// One interaction zone in dimensionless form (times in tau, frequencies as
/// products with tau). `a` is the dimensionless Rabi frequency |Omega|/|Delta|.
template <typename Scalar = double>
struct ZoneParameters {
    Scalar delta_tau;        // signed, nonzero
    Scalar omega_alpha_tau;  // >= 0
    Scalar rabi_tau;         // |Omega(x)| tau at the evaluation point, >= 0
    Scalar a;                // rabi_tau / |delta_tau|
    Envelope<Scalar> envelope = Envelope<Scalar>::eckart();

    static ZoneParameters make(Scalar delta_tau, Scalar omega_alpha_tau,
                               Scalar rabi_tau,
                               Envelope<Scalar> env = Envelope<Scalar>::eckart()) {
        if (delta_tau == Scalar(0))
            throw DomainError("delta_tau must be nonzero");
        if (!(omega_alpha_tau >= Scalar(0)))
            throw DomainError("omega_alpha_tau must be >= 0");
        if (!(rabi_tau >= Scalar(0))) throw DomainError("rabi_tau must be >= 0");
        ZoneParameters z;
        z.delta_tau = delta_tau;
        z.omega_alpha_tau = omega_alpha_tau;
        z.rabi_tau = rabi_tau;
        z.a = rabi_tau / std::abs(delta_tau);
        z.envelope = std::move(env);
        return z;
    }

    /// Same zone at dimensionless Rabi a instead of rabi_tau.
    static ZoneParameters from_a(Scalar delta_tau, Scalar omega_alpha_tau,
                                 Scalar a,
                                 Envelope<Scalar> env = Envelope<Scalar>::eckart()) {
        if (!(a >= Scalar(0))) throw DomainError("a must be >= 0");
        return make(delta_tau, omega_alpha_tau, a * std::abs(delta_tau),
                    std::move(env));
    }

    Scalar delta_sign() const { return delta_tau > 0 ? Scalar(1) : Scalar(-1); }
    Scalar abs_delta_tau() const { return std::abs(delta_tau); }
};

/// Reduce a physical setup at transverse position x to dimensionless zone
/// parameters.
inline ZoneParameters<double> to_dimensionless(const PhysicalSetup& s,
                                               const Envelope<double>& env,
                                               double x) {
    s.validate();
    const double k = s.wavenumber();
    const double om_a = doppler_frequency(k, s.velocity, s.half_angle_alpha);
    const double om = rabi_frequency(s.rabi_peak, k, s.half_angle_alpha, x);
    return ZoneParameters<double>::make(s.detuning * s.envelope_time,
                                        om_a * s.envelope_time,
                                        std::abs(om) * s.envelope_time, env);
}

/// Inverse of to_dimensionless up to the sign of Omega (only |Omega| survives).
struct DimensionalZone {
    double detuning;     // 1/s
    double omega_alpha;  // 1/s
    double rabi_abs;     // 1/s
};

inline DimensionalZone to_dimensional(const ZoneParameters<double>& z,
                                      double tau) {
    if (!(tau > 0)) throw DomainError("tau must be > 0");
    return {z.delta_tau / tau, z.omega_alpha_tau / tau, z.rabi_tau / tau};
}

struct ValidityCriterion {
    bool evaluated = false;
    double margin = 0;  // valid only when evaluated
    bool pass = false;
};

/// Margins for the model's three working assumptions; each "much greater than"
/// inequality passes when its margin exceeds `threshold`. The report is
/// informational and never blocks a computation.
struct ValidityReport {
    ValidityCriterion adiabatic;    // |Delta| tau / sqrt(1 + (omega_alpha tau)^2)
    ValidityCriterion raman_nath;   // 1 / (omega_rec tau^2 Omega_0)
    ValidityCriterion spontaneous;  // 1 / (Gamma tau (Omega_0/Delta)^2)
    double threshold = 10.0;
    double omega_alpha_over_delta = 0;  // weak-field |gamma/beta| ratio
};

inline ValidityReport validity_report(const PhysicalSetup& s,
                                      const Envelope<double>& /*env*/,
                                      double threshold = 10.0) {
    s.validate();
    ValidityReport r;
    r.threshold = threshold;

    const double k = s.wavenumber();
    const double om_a = doppler_frequency(k, s.velocity, s.half_angle_alpha);
    const double tau = s.envelope_time;
    const double wat = om_a * tau;

    r.adiabatic.evaluated = true;
    r.adiabatic.margin = std::abs(s.detuning) * tau / std::sqrt(1.0 + wat * wat);
    r.adiabatic.pass = r.adiabatic.margin > threshold;

    if (s.recoil_frequency && s.rabi_peak > 0) {
        r.raman_nath.evaluated = true;
        r.raman_nath.margin =
            1.0 / (*s.recoil_frequency * tau * tau * s.rabi_peak);
        r.raman_nath.pass = r.raman_nath.margin > threshold;
    }
    if (s.spontaneous_rate && s.rabi_peak > 0) {
        const double w = s.rabi_peak / s.detuning;  // peak excited occupation ~ w^2
        r.spontaneous.evaluated = true;
        r.spontaneous.margin = 1.0 / (*s.spontaneous_rate * tau * w * w);
        r.spontaneous.pass = r.spontaneous.margin > threshold;
    }

    r.omega_alpha_over_delta = om_a / std::abs(s.detuning);
    return r;
}

}  // namespace berryoptics
