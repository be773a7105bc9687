#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "berryoptics/ode.hpp"
#include "berryoptics/phases.hpp"

namespace berryoptics {

/// Rotating frames of the two-level amplitudes. Lab carries the detuning
/// Delta on the diagonal and the Doppler oscillation in the coupling; Tilde
/// absorbs the Doppler shift into the effective detuning
/// Delta~ = Delta + omega_alpha and has a real coupling.
enum class Frame { Lab, Tilde };

inline const char* to_string(Frame f) {
    return f == Frame::Lab ? "lab" : "tilde";
}

struct TwoLevelState {
    std::complex<double> amp_e;
    std::complex<double> amp_g;
    Frame frame = Frame::Tilde;
    double t = 0;  // units of tau

    double norm_sq() const { return std::norm(amp_e) + std::norm(amp_g); }
    double pop_e() const { return std::norm(amp_e); }
    double pop_g() const { return std::norm(amp_g); }
};

struct SolverStats {
    long steps = 0;
    long rejected = 0;
    double max_norm_drift = 0;
};

struct TwoLevelTrajectory {
    std::vector<TwoLevelState> states;  // strictly increasing t
    ZoneParameters<double> zone;
    Frame frame = Frame::Tilde;
    SolverStats stats;
};

/// Diagonal frequency of the frame (what multiplies sigma_z/2 when the field
/// is off); this is the trend removed when extracting the physical phase.
inline double frame_detuning_tau(const ZoneParameters<double>& zone, Frame f) {
    return f == Frame::Tilde ? zone.delta_tau + zone.omega_alpha_tau
                             : zone.delta_tau;
}

/// Toggle between Lab and Tilde amplitudes at the state's own time:
/// amp_e -> amp_e e^{-i s w t/2}, amp_g -> amp_g e^{+i s w t/2} with s = +1
/// for Lab -> Tilde. Populations are untouched and the map is an involution.
inline TwoLevelState frame_transform(const TwoLevelState& st,
                                     const ZoneParameters<double>& zone) {
    const double s = st.frame == Frame::Lab ? 1.0 : -1.0;
    const double half = s * zone.omega_alpha_tau * st.t / 2;
    TwoLevelState out = st;
    out.amp_e = st.amp_e * std::polar(1.0, -half);
    out.amp_g = st.amp_g * std::polar(1.0, +half);
    out.frame = st.frame == Frame::Lab ? Frame::Tilde : Frame::Lab;
    return out;
}

namespace detail {

inline Eigen::Vector4d pack(std::complex<double> e, std::complex<double> g) {
    return {e.real(), e.imag(), g.real(), g.imag()};
}

inline void unpack(const Eigen::Vector4d& y, std::complex<double>& e,
                   std::complex<double>& g) {
    e = {y[0], y[1]};
    g = {y[2], y[3]};
}

}  // namespace detail

/// Integrate the two-level Schroedinger equation across the envelope window
/// [-T, T], starting from the ground state. In the Tilde frame,
///   i d/dth (Ae, Ag) = 1/2 [[D~, W f(th)], [W f(th), -D~]] (Ae, Ag),
/// with D~ = (Delta + omega_alpha) tau, W = |Omega| tau; the Lab frame carries
/// the extra e^{+-i omega_alpha tau th} factors on the coupling. The Lab run
/// starts from the frame-transformed Tilde ground state so the two frames
/// describe the identical physical solution.
inline TwoLevelTrajectory solve_two_level(const ZoneParameters<double>& zone,
                                          Frame frame, double rtol = 1e-10,
                                          double atol = 1e-12,
                                          int n_samples = 0) {
    if (!(rtol > 0) || !(atol > 0))
        throw DomainError("solve_two_level: tolerances must be positive");
    const double W = zone.envelope.half_window();
    const double dt = frame_detuning_tau(zone, frame);
    const double wt = zone.omega_alpha_tau;
    const double rt = zone.rabi_tau;

    if (n_samples <= 0) {
        // keep per-sample phase increments well below pi/2 for unwrapping
        const double rate = std::abs(dt) / 2 + rt / 2 + 1.0;
        n_samples = std::max(513, static_cast<int>(2 * W * rate / 1.0) + 2);
    }

    Dopri5<4>::Rhs rhs;
    if (frame == Frame::Tilde) {
        rhs = [&zone, dt, rt](double th, const Eigen::Vector4d& y,
                              Eigen::Vector4d& dy) {
            std::complex<double> e, g;
            detail::unpack(y, e, g);
            const double c = rt * zone.envelope(th);
            const std::complex<double> de =
                std::complex<double>(0, -0.5) * (dt * e + c * g);
            const std::complex<double> dg =
                std::complex<double>(0, -0.5) * (c * e - dt * g);
            dy = detail::pack(de, dg);
        };
    } else {
        rhs = [&zone, dt, rt, wt](double th, const Eigen::Vector4d& y,
                                  Eigen::Vector4d& dy) {
            std::complex<double> e, g;
            detail::unpack(y, e, g);
            // coupling V = W f e^{-i wt th}; V* sits above the diagonal
            const std::complex<double> v =
                rt * zone.envelope(th) * std::polar(1.0, -wt * th);
            const std::complex<double> de =
                std::complex<double>(0, -0.5) * (dt * e + std::conj(v) * g);
            const std::complex<double> dg =
                std::complex<double>(0, -0.5) * (v * e - dt * g);
            dy = detail::pack(de, dg);
        };
    }

    TwoLevelState init;
    init.amp_e = 0;
    init.amp_g = 1;
    init.frame = Frame::Tilde;
    init.t = -W;
    if (frame == Frame::Lab) init = frame_transform(init, zone);

    OdeOptions opts;
    // local tolerances are tightened so the accumulated end-to-end error
    // lands within ~10x the requested tolerance (global vs per-step error)
    opts.rtol = std::max(rtol / 1000, 2.5e-15);
    opts.atol = std::max(atol / 1000, 1e-18);
    Dopri5<4> solver(rhs, opts);

    std::vector<double> times(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
        times[static_cast<size_t>(i)] = -W + 2 * W * i / (n_samples - 1);

    TwoLevelTrajectory traj;
    traj.zone = zone;
    traj.frame = frame;
    traj.states.reserve(times.size());
    double drift = 0;
    solver.integrate(-W, detail::pack(init.amp_e, init.amp_g), W, times,
                     [&](double th, const Eigen::Vector4d& y) {
                         TwoLevelState s;
                         detail::unpack(y, s.amp_e, s.amp_g);
                         s.frame = frame;
                         s.t = th;
                         traj.states.push_back(s);
                         drift = std::max(drift, std::abs(s.norm_sq() - 1.0));
                     });
    traj.stats.steps = solver.stats().steps;
    traj.stats.rejected = solver.stats().rejected;
    traj.stats.max_norm_drift = drift;
    return traj;
}

/// Detrended unwrapped phase of the ground amplitude along the trajectory:
/// arg amp_g with the frame's free trend D_frame (t - t0)/2 removed, unwrapped
/// by nearest-branch continuation (relative to the first sample).
inline std::vector<double> unwrapped_phase_series(
    const TwoLevelTrajectory& traj) {
    if (traj.states.size() < 2)
        throw DomainError("unwrapped_phase_series: trajectory too short");
    const double dt = frame_detuning_tau(traj.zone, traj.frame);
    const double t0 = traj.states.front().t;
    std::vector<double> out;
    out.reserve(traj.states.size());
    double prev = 0, acc = 0;
    bool first = true;
    for (const auto& s : traj.states) {
        if (std::abs(s.amp_g) < 0.5)
            throw DomainError(
                "unwrapped phase: |amp_g| dropped below 0.5; phase "
                "unwrapping undefined outside the adiabatic regime");
        const std::complex<double> detrended =
            s.amp_g * std::polar(1.0, -dt * (s.t - t0) / 2);
        const double ph = std::arg(detrended);
        if (!first) {
            double d = ph - prev;
            d -= 2 * kPi * std::round(d / (2 * kPi));
            if (std::abs(d) > kPi / 2)
                throw DomainError(
                    "unwrapped phase: step exceeds pi/2; sample the "
                    "trajectory more densely");
            acc += d;
        }
        prev = ph;
        first = false;
        out.push_back(acc);
    }
    return out;
}

/// Endpoint of the unwrapped phase series: the physical accumulated phase of
/// the ground state.
inline double extract_total_phase(const TwoLevelTrajectory& traj) {
    return unwrapped_phase_series(traj).back();
}

struct WkbPhase {
    double phi_g_total = 0;  // unexpanded phase at the effective detuning
    double beta_part = 0;    // sign(Delta) beta from the Taylor split
    double gamma_part = 0;   // gamma from the Taylor split
    bool adiabatic_ok = true;
};

/// Semiclassical ground-state phase
/// phi~_g = sign(D~)/2 Int (sqrt(D~^2 + W^2 f^2) - |D~|) dt
/// together with its expansion in omega_alpha/|Delta| into dynamical and
/// geometric parts.
inline WkbPhase wkb_phase(const ZoneParameters<double>& zone,
                          double tol = 1e-12) {
    const double dt_eff = zone.delta_tau + zone.omega_alpha_tau;
    if (dt_eff == 0)
        throw DomainError("wkb_phase: effective detuning vanishes");
    const double sign_eff = dt_eff > 0 ? 1.0 : -1.0;
    auto zone_eff = ZoneParameters<double>::make(dt_eff, 0.0, zone.rabi_tau,
                                                 zone.envelope);
    WkbPhase w;
    w.phi_g_total = sign_eff * dynamical_phase_quadrature(zone_eff, tol).value;
    w.beta_part =
        zone.delta_sign() * dynamical_phase_quadrature(zone, tol).value;
    w.gamma_part = geometric_phase_quadrature(zone, tol).value;
    const double wat = zone.omega_alpha_tau;
    w.adiabatic_ok =
        std::abs(zone.delta_tau) / std::sqrt(1.0 + wat * wat) >= 1.0;
    return w;
}

struct PerturbativePhase {
    double phi = 0;             // (a^2/4) Delta^2/(Delta + omega_alpha) Int f^2
    double dynamical_part = 0;  // (a^2/4) Delta tau Int f^2
    double geometric_part = 0;  // -(a^2/4) omega_alpha tau Int f^2
    bool a_in_range = true;     // a < 0.3 recommended
};

/// Second-order (weak-field) ground-state phase and its split into the
/// dynamical and geometric contributions.
inline PerturbativePhase perturbative_phase(const ZoneParameters<double>& zone,
                                            double tol = 1e-12) {
    const double dt_eff = zone.delta_tau + zone.omega_alpha_tau;
    if (dt_eff == 0)
        throw DomainError("perturbative_phase: effective detuning vanishes");
    const auto& f = zone.envelope;
    QuadratureOptions opts;
    opts.abs_tol = opts.rel_tol = tol;
    const double i2 = integrate_adaptive(
                          [&](double th) {
                              const double ft = f(th);
                              return ft * ft;
                          },
                          -f.half_window(), f.half_window(), opts)
                          .value;
    const double a2_4 = zone.a * zone.a / 4;
    PerturbativePhase p;
    p.phi = a2_4 * (zone.delta_tau * zone.delta_tau / dt_eff) * i2;
    p.dynamical_part = a2_4 * zone.delta_tau * i2;
    p.geometric_part = -a2_4 * zone.omega_alpha_tau * i2;
    p.a_in_range = zone.a < 0.3;
    return p;
}

struct TwoZoneResult {
    PhaseResult phases;            // method = ODE; phi_g is the extracted total
    double gamma_expected = 0;     // gamma + gamma' by quadrature
    double dynamical_residual = 0; // |extracted - gamma_expected|
    double final_pop_e = 0;
    bool gap_ok = true;            // gap >= 5 tau
    SolverStats stats;
};

/// Simulate the full blue-then-red sequence in the bare interaction picture,
///   i da_e/dth = C(th) a_g,  i da_g/dth = conj(C) a_e,
/// with C = (W f/2) e^{i D~ th} per zone and C = 0 in the gap (free evolution
/// is the identity for these amplitudes). The accumulated arg a_g is the
/// total ground-state phase; with opposite detunings it is the summed
/// geometric phase up to nonadiabatic residuals.
inline TwoZoneResult simulate_two_zone(const ZoneParameters<double>& blue,
                                       const ZoneParameters<double>& red,
                                       double gap, double rtol = 1e-10,
                                       double atol = 1e-12) {
    const double scale = std::abs(blue.delta_tau);
    if (std::abs(red.delta_tau + blue.delta_tau) > 1e-12 * scale)
        throw DomainError("simulate_two_zone: detunings must be opposite");
    if (std::abs(red.rabi_tau - blue.rabi_tau) >
        1e-12 * std::max(1.0, blue.rabi_tau))
        throw DomainError("simulate_two_zone: Rabi profiles must match");
    if (!(gap >= 0)) throw DomainError("simulate_two_zone: gap must be >= 0");

    const double W1 = blue.envelope.half_window();
    const double W2 = red.envelope.half_window();
    const double c2 = W1 + gap + W2;  // center of the second zone
    const double d1 = blue.delta_tau + blue.omega_alpha_tau;
    const double d2 = red.delta_tau + red.omega_alpha_tau;

    auto coupling = [&](double th) -> std::complex<double> {
        if (th <= W1 + gap / 2)
            return 0.5 * blue.rabi_tau * blue.envelope(th) *
                   std::polar(1.0, d1 * th);
        return 0.5 * red.rabi_tau * red.envelope(th - c2) *
               std::polar(1.0, d2 * th);
    };
    auto rhs = [&coupling](double th, const Eigen::Vector4d& y,
                           Eigen::Vector4d& dy) {
        std::complex<double> e, g;
        detail::unpack(y, e, g);
        const std::complex<double> c = coupling(th);
        dy = detail::pack(std::complex<double>(0, -1) * c * g,
                          std::complex<double>(0, -1) * std::conj(c) * e);
    };

    OdeOptions opts;
    opts.rtol = std::max(rtol / 1000, 2.5e-15);
    opts.atol = std::max(atol / 1000, 1e-18);
    Dopri5<4> solver(rhs, opts);

    const double t0 = -W1, t1 = c2 + W2;
    const double rate = std::max(std::abs(d1), std::abs(d2)) / 2 +
                        blue.rabi_tau / 2 + 1.0;
    const int n = std::max(1025, static_cast<int>((t1 - t0) * rate) + 2);
    std::vector<double> times(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        times[static_cast<size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);

    double prev = 0, acc = 0;
    bool first = true;
    std::complex<double> e_end, g_end;
    solver.integrate(t0, detail::pack({0, 0}, {1, 0}), t1, times,
                     [&](double, const Eigen::Vector4d& y) {
                         std::complex<double> e, g;
                         detail::unpack(y, e, g);
                         if (std::abs(g) < 0.5)
                             throw DomainError(
                                 "simulate_two_zone: left adiabatic regime");
                         const double ph = std::arg(g);
                         if (!first) {
                             double d = ph - prev;
                             d -= 2 * kPi * std::round(d / (2 * kPi));
                             if (std::abs(d) > kPi / 2)
                                 throw DomainError(
                                     "simulate_two_zone: phase step exceeds "
                                     "pi/2");
                             acc += d;
                         }
                         prev = ph;
                         first = false;
                         e_end = e;
                         g_end = g;
                     });

    TwoZoneResult r;
    const auto gb = geometric_phase_quadrature(blue, 1e-12);
    const auto gr = geometric_phase_quadrature(red, 1e-12);
    r.gamma_expected = gb.value + gr.value;
    r.phases.beta = 0;
    r.phases.gamma = acc;
    r.phases.phi_g = acc;
    r.phases.phi_e = -acc - kPi;
    r.phases.method = PhaseMethod::ODE;
    r.phases.est_error = std::abs(acc - r.gamma_expected);
    r.dynamical_residual = std::abs(acc - r.gamma_expected);
    r.final_pop_e = std::norm(e_end);
    r.gap_ok = gap >= 5.0;
    r.stats.steps = solver.stats().steps;
    r.stats.rejected = solver.stats().rejected;
    r.stats.max_norm_drift = std::abs(std::norm(e_end) + std::norm(g_end) - 1);
    return r;
}

}  // namespace berryoptics
