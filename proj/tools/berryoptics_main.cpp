// berryoptics command line: deterministic CSV/JSON artifacts for phase
// computations, oracle comparisons, parameter sweeps, and packet simulations.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <clocale>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "berryoptics/circuit.hpp"
#include "berryoptics/csv.hpp"
#include "berryoptics/dynamics.hpp"
#include "berryoptics/model.hpp"
#include "berryoptics/phases.hpp"
#include "berryoptics/version.hpp"
#include "berryoptics/wavepacket.hpp"

namespace bo = berryoptics;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
bool is_set(double v) { return !std::isnan(v); }

// ---------------------------------------------------------------- helpers

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

int env_threads() {
    if (const char* v = std::getenv("BERRYOPTICS_THREADS")) {
        const int n = std::atoi(v);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// ------------------------------------------------------------- zone flags

struct ZoneFlags {
    std::string envelope = "eckart";
    double half_window = kUnset;  // per-kind default when unset
    std::string envelope_file;    // tabulated: CSV lines "theta,value"
    double a = kUnset;            // exactly one of a / rabi_tau; default a = 1
    double rabi_tau = kUnset;
    double delta_tau = 10.0;
    double omega_alpha_tau = 1.0;
};

bo::Envelope<double> make_envelope(const ZoneFlags& zf) {
    const double hw = zf.half_window;
    if (zf.envelope == "eckart")
        return is_set(hw) ? bo::Envelope<double>::eckart(hw)
                          : bo::Envelope<double>::eckart();
    if (zf.envelope == "gaussian")
        return is_set(hw) ? bo::Envelope<double>::gaussian(hw)
                          : bo::Envelope<double>::gaussian();
    if (zf.envelope == "mesa")
        return is_set(hw) ? bo::Envelope<double>::mesa(hw)
                          : bo::Envelope<double>::mesa();
    if (zf.envelope == "tabulated") {
        if (zf.envelope_file.empty())
            throw bo::ConfigError("tabulated envelope needs --envelope-file");
        std::ifstream in(zf.envelope_file);
        if (!in)
            throw bo::ConfigError("cannot read envelope file " +
                                  zf.envelope_file);
        std::vector<double> xs, ys;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto cells = split(line, ',');
            if (cells.size() != 2)
                throw bo::ConfigError("envelope file: expected 'theta,value'");
            xs.push_back(std::stod(cells[0]));
            ys.push_back(std::stod(cells[1]));
        }
        Eigen::ArrayXd ax =
            Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<long>(xs.size()));
        Eigen::ArrayXd ay =
            Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<long>(ys.size()));
        return bo::Envelope<double>::tabulated(ax, ay);
    }
    throw bo::ConfigError("unknown envelope kind '" + zf.envelope + "'");
}

bo::ZoneParameters<double> make_zone(const ZoneFlags& zf) {
    if (is_set(zf.a) && is_set(zf.rabi_tau))
        throw bo::ConfigError("give either --a or --rabi-tau, not both");
    auto env = make_envelope(zf);
    if (is_set(zf.rabi_tau))
        return bo::ZoneParameters<double>::make(
            zf.delta_tau, zf.omega_alpha_tau, zf.rabi_tau, env);
    const double a = is_set(zf.a) ? zf.a : 1.0;
    return bo::ZoneParameters<double>::from_a(zf.delta_tau, zf.omega_alpha_tau,
                                              a, env);
}

json zone_config(const ZoneFlags& zf) {
    auto z = make_zone(zf);
    json j;
    j["envelope"] = zf.envelope;
    j["half_window"] = z.envelope.half_window();
    if (!zf.envelope_file.empty()) j["envelope_file"] = zf.envelope_file;
    j["delta_tau"] = z.delta_tau;
    j["omega_alpha_tau"] = z.omega_alpha_tau;
    j["rabi_tau"] = z.rabi_tau;
    j["a"] = z.a;
    return j;
}

// --------------------------------------------------------------- outputs

struct OutputSink {
    fs::path dir;

    explicit OutputSink(const std::string& out) : dir(out) {
        fs::create_directories(dir);
    }
    std::string path(const std::string& name) const {
        return (dir / name).string();
    }
    void summary(const std::string& command, const json& config,
                 const json& results) const {
        json doc;
        doc["schema_version"] = 1;
        doc["toolkit_version"] = bo::kVersion;
        doc["command"] = command;
        doc["config"] = config;
        json hashed;
        hashed["command"] = command;
        hashed["config"] = config;
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a(hashed.dump())));
        doc["config_hash"] = std::string(hex);
        doc["results"] = results;
        std::ofstream out(path("summary.json"), std::ios::binary);
        if (!out) throw bo::Error("cannot write summary.json");
        out << doc.dump(2) << '\n';
    }
};

// ------------------------------------------------------------ method set

struct MethodOutputs {
    std::string name;
    bo::PhaseResult result;
};

std::vector<MethodOutputs> run_methods(const bo::ZoneParameters<double>& zone,
                                       const std::vector<std::string>& methods,
                                       double tol) {
    std::vector<MethodOutputs> out;
    const bool eckart = zone.envelope.kind() == bo::EnvelopeKind::Eckart;
    for (const auto& m : methods) {
        bo::PhaseResult r;
        if (m == "quadrature") {
            auto g = bo::geometric_phase_quadrature(zone, tol);
            auto b = bo::dynamical_phase_quadrature(zone, tol);
            r = bo::make_phase_result(b.value, g.value, zone.delta_sign(),
                                      bo::PhaseMethod::Quadrature,
                                      g.error_estimate + b.error_estimate);
        } else if (m == "closed") {
            if (!eckart)
                throw bo::ConfigError(
                    "closed-form method requires the eckart envelope");
            r = bo::make_phase_result(
                bo::eckart_dynamical_phase(zone.a, zone.abs_delta_tau()),
                bo::eckart_geometric_phase(zone.a, zone.omega_alpha_tau),
                zone.delta_sign(), bo::PhaseMethod::ClosedForm, 0.0);
        } else if (m == "weakfield") {
            auto w = bo::weak_field_phases(zone);
            r = bo::make_phase_result(w.beta, w.gamma, zone.delta_sign(),
                                      bo::PhaseMethod::WeakField, 0.0);
        } else if (m == "winding") {
            if (!eckart)
                throw bo::ConfigError(
                    "winding method requires the eckart envelope");
            if (zone.omega_alpha_tau <= 0)
                throw bo::ConfigError(
                    "winding method requires omega_alpha_tau > 0");
            const long N =
                static_cast<long>(std::ceil(10 * zone.omega_alpha_tau)) + 20;
            auto s = bo::winding_sum(N, zone.a, zone.omega_alpha_tau);
            auto b = bo::dynamical_phase_quadrature(zone, tol);
            r = bo::make_phase_result(
                b.value, s.partial_sum, zone.delta_sign(),
                bo::PhaseMethod::WindingSum,
                std::abs(s.extrapolated_limit - s.partial_sum));
        } else if (m == "flux") {
            auto g = bo::surface_flux_quadrature(zone, tol);
            auto b = bo::dynamical_phase_quadrature(zone, tol);
            r = bo::make_phase_result(b.value, g.value, zone.delta_sign(),
                                      bo::PhaseMethod::Quadrature,
                                      g.error_estimate + b.error_estimate);
        } else {
            throw bo::ConfigError("unknown method '" + m + "'");
        }
        out.push_back({m, r});
    }
    return out;
}

double methods_diff_max(const std::vector<MethodOutputs>& ms) {
    double d = 0;
    for (size_t i = 1; i < ms.size(); ++i) {
        d = std::max(d, std::abs(ms[i].result.beta - ms[0].result.beta));
        d = std::max(d, std::abs(ms[i].result.gamma - ms[0].result.gamma));
    }
    return d;
}

json method_json(const std::vector<MethodOutputs>& ms) {
    json out;
    for (const auto& m : ms) {
        json r;
        r["beta"] = m.result.beta;
        r["gamma"] = m.result.gamma;
        r["phi_g"] = m.result.phi_g;
        r["phi_e"] = m.result.phi_e;
        r["phi_g_wrapped"] = bo::wrap_phase(m.result.phi_g);
        r["phi_e_wrapped"] = bo::wrap_phase(m.result.phi_e);
        r["est_error"] = m.result.est_error;
        out[m.name] = r;
    }
    return out;
}

// -------------------------------------------------------------- commands

struct PhasesCmd {
    ZoneFlags zone;
    double tol = 1e-10;
    std::string methods = "quadrature,closed";

    json config() const {
        json j;
        j["zone"] = zone_config(zone);
        j["tol"] = tol;
        j["methods"] = methods;
        return j;
    }

    void run(const OutputSink& sink) const {
        auto z = make_zone(zone);
        auto ms = run_methods(z, split(methods, ','), tol);
        bo::CsvWriter csv(sink.path("phases.csv"),
                          {"method", "beta_rad", "gamma_rad", "phi_g_rad",
                           "phi_e_rad", "est_error_rad"});
        for (const auto& m : ms)
            csv.row_mixed({m.name, bo::format_double(m.result.beta),
                           bo::format_double(m.result.gamma),
                           bo::format_double(m.result.phi_g),
                           bo::format_double(m.result.phi_e),
                           bo::format_double(m.result.est_error)});
        json res;
        res["methods"] = method_json(ms);
        if (ms.size() > 1) res["diff_max"] = methods_diff_max(ms);
        sink.summary("phases", config(), res);
    }
};

struct WindingsCmd {
    double a = 1.0;
    double omega_alpha_tau = 1.0;
    long n_max = 0;  // 0: ceil(10 w) + 20

    long effective_n() const {
        return n_max > 0
                   ? n_max
                   : static_cast<long>(std::ceil(10 * omega_alpha_tau)) + 20;
    }
    json config() const {
        json j;
        j["a"] = a;
        j["omega_alpha_tau"] = omega_alpha_tau;
        j["n_max"] = effective_n();
        return j;
    }

    void run(const OutputSink& sink) const {
        const long N = effective_n();
        bo::CsvWriter csv(sink.path("windings.csv"),
                          {"m", "gamma_m_rad", "partial_direct_rad",
                           "partial_telescoped_rad"});
        double direct = 0;
        for (long m = 1; m <= N; ++m) {
            const double gm = bo::winding_phase(m, a, omega_alpha_tau);
            direct += gm;
            const double tele =
                bo::winding_sum(m, a, omega_alpha_tau).partial_sum;
            csv.row_mixed({std::to_string(m), bo::format_double(gm),
                           bo::format_double(direct), bo::format_double(tele)});
        }
        auto s = bo::winding_sum(N, a, omega_alpha_tau);
        const double closed = bo::eckart_geometric_phase(a, omega_alpha_tau);
        json res;
        res["partial_sum"] = s.partial_sum;
        res["extrapolated_limit"] = s.extrapolated_limit;
        res["closed_form"] = closed;
        res["abs_diff_to_closed"] = std::abs(s.partial_sum - closed);
        sink.summary("windings", config(), res);
    }
};

struct CircuitCmd {
    ZoneFlags zone;
    int n_samples = 2001;

    json config() const {
        json j;
        j["zone"] = zone_config(zone);
        j["n_samples"] = n_samples;
        return j;
    }

    void run(const OutputSink& sink) const {
        auto z = make_zone(zone);
        auto path = bo::circuit_path(z, n_samples);
        bo::CsvWriter csv(sink.path("circuit.csv"),
                          {"t_over_tau", "phi_rad", "rho", "X", "Y", "Z"});
        for (const auto& s : path) csv.row({s.t, s.phi, s.rho, s.X, s.Y, s.Z});
        json res;
        res["n_samples"] = static_cast<int>(path.size());
        res["rho_max"] = z.a;
        sink.summary("circuit", config(), res);
    }
};

struct DynamicsCmd {
    ZoneFlags zone;
    std::string frame = "tilde";
    double rtol = 1e-10;
    double atol = 1e-12;
    int n_samples = 0;
    bool two_zone = false;
    double gap = 10.0;

    json config() const {
        json j;
        j["zone"] = zone_config(zone);
        j["frame"] = frame;
        j["rtol"] = rtol;
        j["atol"] = atol;
        j["n_samples"] = n_samples;
        j["two_zone"] = two_zone;
        if (two_zone) j["gap"] = gap;
        return j;
    }

    void run(const OutputSink& sink) const {
        auto z = make_zone(zone);
        if (two_zone) {
            auto red = bo::ZoneParameters<double>::make(
                -z.delta_tau, z.omega_alpha_tau, z.rabi_tau, z.envelope);
            auto r = bo::simulate_two_zone(z, red, gap, rtol, atol);
            json res;
            res["total_phase"] = r.phases.phi_g;
            res["gamma_expected"] = r.gamma_expected;
            res["dynamical_residual"] = r.dynamical_residual;
            res["final_pop_e"] = r.final_pop_e;
            res["gap_ok"] = r.gap_ok;
            res["steps"] = r.stats.steps;
            res["rejected_steps"] = r.stats.rejected;
            res["max_norm_drift"] = r.stats.max_norm_drift;
            sink.summary("dynamics", config(), res);
            return;
        }

        if (frame != "lab" && frame != "tilde")
            throw bo::ConfigError("frame must be 'lab' or 'tilde'");
        const bo::Frame fr = frame == "lab" ? bo::Frame::Lab : bo::Frame::Tilde;
        auto traj = bo::solve_two_level(z, fr, rtol, atol, n_samples);
        auto phases = bo::unwrapped_phase_series(traj);
        bo::CsvWriter csv(
            sink.path("trajectory.csv"),
            {"t_over_tau", "re_amp_e", "im_amp_e", "re_amp_g", "im_amp_g",
             "pop_e", "pop_g", "phase_unwrapped_rad"});
        for (size_t i = 0; i < traj.states.size(); ++i) {
            const auto& s = traj.states[i];
            csv.row({s.t, s.amp_e.real(), s.amp_e.imag(), s.amp_g.real(),
                     s.amp_g.imag(), s.pop_e(), s.pop_g(), phases[i]});
        }
        json res;
        res["extracted_phase"] = phases.back();
        res["final_pop_e"] = traj.states.back().pop_e();
        auto w = bo::wkb_phase(z);
        res["wkb"] = {{"phi_g_total", w.phi_g_total},
                      {"beta_part", w.beta_part},
                      {"gamma_part", w.gamma_part},
                      {"adiabatic_ok", w.adiabatic_ok}};
        auto p = bo::perturbative_phase(z);
        res["perturbative"] = {{"phi", p.phi},
                               {"dynamical_part", p.dynamical_part},
                               {"geometric_part", p.geometric_part}};
        if (z.envelope.kind() == bo::EnvelopeKind::Eckart) {
            res["closed"] = {
                {"beta", bo::eckart_dynamical_phase(z.a, z.abs_delta_tau())},
                {"gamma", bo::eckart_geometric_phase(z.a, z.omega_alpha_tau)}};
        }
        res["steps"] = traj.stats.steps;
        res["rejected_steps"] = traj.stats.rejected;
        res["max_norm_drift"] = traj.stats.max_norm_drift;
        sink.summary("dynamics", config(), res);
    }
};

struct PacketCmd {
    ZoneFlags zone;  // a is read as Omega_0/|Delta| at the antinode
    double b = kUnset;
    double k_dx0 = 0.25;
    double alpha = 0.0;
    int n_zones = 2;
    double t_max = 1.0;
    int n_times = 101;
    int grid_n = 8192;
    double grid_half_width = kUnset;
    std::string snapshots;  // comma list of times (t_s) to dump the packet

    json config() const {
        json j;
        if (is_set(b)) {
            j["b"] = b;
        } else {
            j["zone"] = zone_config(zone);
            j["k_dx0"] = k_dx0;
            j["alpha"] = alpha;
            j["n_zones"] = n_zones;
        }
        j["t_max_over_ts"] = t_max;
        j["n_times"] = n_times;
        j["grid_n"] = grid_n;
        if (is_set(grid_half_width)) j["grid_half_width"] = grid_half_width;
        if (!snapshots.empty()) j["snapshots"] = snapshots;
        return j;
    }

    void run(const OutputSink& sink) const {
        // natural units: width0 = 1, t_s = 1, hbar/M = 1
        double b_eff;
        bo::SampledPacket packet;
        if (is_set(b)) {
            b_eff = b;
            packet = make_grid(b_eff);
            packet.amps *=
                (std::complex<double>(0, -0.5) * b_eff * packet.grid.square())
                    .exp();
        } else {
            auto z = make_zone(zone);
            b_eff = bo::quadratic_b(z, k_dx0, alpha, n_zones);
            packet = make_grid(b_eff);
            auto prof = bo::berry_phase_profile(
                z, packet.grid, k_dx0 * std::cos(alpha), n_zones);
            packet.amps *= (std::complex<double>(0, 1) * prof).exp();
        }
        const bo::GaussianPacket gp{1.0, b_eff, 1.0};
        const bo::GaussianPacket gfree{1.0, 0.0, 1.0};

        bo::CsvWriter csv(sink.path("widths.csv"),
                          {"t_over_ts", "width_numeric_dx0",
                           "width_analytic_dx0", "width_free_dx0"});
        double min_numeric = std::numeric_limits<double>::infinity();
        double argmin = 0;
        for (int i = 0; i < n_times; ++i) {
            const double t = t_max * i / (n_times - 1);
            auto q = bo::propagate_free(packet, t, 1.0);
            const double w = bo::measure_width(q);
            if (w < min_numeric) {
                min_numeric = w;
                argmin = t;
            }
            csv.row(
                {t, w, bo::analytic_width(t, gp), bo::analytic_width(t, gfree)});
        }
        int snap_idx = 0;
        for (const auto& ts : split(snapshots, ',')) {
            const double t = std::stod(ts);
            auto q = bo::propagate_free(packet, t, 1.0);
            bo::CsvWriter snap(
                sink.path("snapshot_" + std::to_string(snap_idx++) + ".csv"),
                {"x_over_dx0", "re_amp", "im_amp", "density"});
            for (Eigen::Index i = 0; i < q.grid.size(); ++i)
                snap.row({q.grid[i], q.amps[i].real(), q.amps[i].imag(),
                          std::norm(q.amps[i])});
        }
        auto [wmin, tmin] = bo::min_width(gp);
        json res;
        res["b"] = b_eff;
        res["width_min_analytic"] = wmin;
        res["t_min_analytic"] = tmin;
        res["width_min_numeric"] = min_numeric;
        res["t_min_numeric"] = argmin;
        sink.summary("packet", config(), res);
    }

    bo::SampledPacket make_grid(double b_for_width) const {
        double hw = grid_half_width;
        if (!is_set(hw)) {
            // wide enough for the broadest curve over [0, t_max]
            const double wmax = bo::analytic_width(
                t_max, bo::GaussianPacket{1.0, -std::abs(b_for_width), 1.0});
            hw = std::max(10.0, 8.0 * wmax);
        }
        return bo::make_gaussian_packet(1.0, grid_n, hw);
    }
};

struct ValidateCmd {
    std::string preset;
    double wavelength = kUnset;
    double velocity = kUnset;
    double alpha = kUnset;
    double detuning = kUnset;
    double rabi_peak = kUnset;
    double tau = kUnset;
    double gamma_sp = kUnset;
    double omega_rec = kUnset;
    double threshold = 10.0;

    bo::PhysicalSetup setup() const {
        bo::PhysicalSetup s{};
        bool have_base = false;
        if (preset == "argon") {
            s.wavelength = 812e-9;
            s.velocity = 700;
            s.half_angle_alpha = 1e-3;
            s.detuning = 3e7;
            s.rabi_peak = 3e6;
            s.envelope_time = 1e-6;
            have_base = true;
        } else if (!preset.empty()) {
            throw bo::ConfigError("unknown preset '" + preset + "'");
        }
        if (is_set(wavelength)) s.wavelength = wavelength;
        if (is_set(velocity)) s.velocity = velocity;
        if (is_set(alpha)) s.half_angle_alpha = alpha;
        if (is_set(detuning)) s.detuning = detuning;
        if (is_set(rabi_peak)) s.rabi_peak = rabi_peak;
        if (is_set(tau)) s.envelope_time = tau;
        if (is_set(gamma_sp)) s.spontaneous_rate = gamma_sp;
        if (is_set(omega_rec)) s.recoil_frequency = omega_rec;
        if (!have_base &&
            !(is_set(wavelength) && is_set(velocity) && is_set(alpha) &&
              is_set(detuning) && is_set(rabi_peak) && is_set(tau)))
            throw bo::ConfigError(
                "validate needs --preset or the full setup flags");
        return s;
    }

    json config() const {
        auto s = setup();
        json j;
        if (!preset.empty()) j["preset"] = preset;
        j["wavelength_m"] = s.wavelength;
        j["velocity_m_s"] = s.velocity;
        j["half_angle_alpha_rad"] = s.half_angle_alpha;
        j["detuning_1_s"] = s.detuning;
        j["rabi_peak_1_s"] = s.rabi_peak;
        j["tau_s"] = s.envelope_time;
        if (s.spontaneous_rate) j["spontaneous_rate_1_s"] = *s.spontaneous_rate;
        if (s.recoil_frequency) j["recoil_frequency_1_s"] = *s.recoil_frequency;
        j["threshold"] = threshold;
        return j;
    }

    static json criterion_json(const bo::ValidityCriterion& c) {
        json j;
        j["evaluated"] = c.evaluated;
        if (c.evaluated) {
            j["margin"] = c.margin;
            j["pass"] = c.pass;
        }
        return j;
    }

    void run(const OutputSink& sink) const {
        auto s = setup();
        auto r =
            bo::validity_report(s, bo::Envelope<double>::eckart(), threshold);
        bo::CsvWriter csv(
            sink.path("validity.csv"),
            {"criterion", "evaluated", "margin", "pass", "threshold"});
        auto row = [&](const char* name, const bo::ValidityCriterion& c) {
            csv.row_mixed({name, c.evaluated ? "1" : "0",
                           c.evaluated ? bo::format_double(c.margin) : "",
                           c.evaluated ? (c.pass ? "1" : "0") : "",
                           bo::format_double(threshold)});
        };
        row("adiabatic", r.adiabatic);
        row("raman_nath", r.raman_nath);
        row("spontaneous", r.spontaneous);
        json res;
        res["adiabatic"] = criterion_json(r.adiabatic);
        res["raman_nath"] = criterion_json(r.raman_nath);
        res["spontaneous"] = criterion_json(r.spontaneous);
        res["omega_alpha_over_delta"] = r.omega_alpha_over_delta;
        sink.summary("validate", config(), res);
    }
};

struct FigureCmd {
    std::string kind = "widths";
    ZoneFlags zone;
    int n_samples = 4001;
    double b = 5.0;
    double t_max = 1.0;
    int n_times = 201;

    json config() const {
        json j;
        j["kind"] = kind;
        if (kind == "circuit") {
            j["zone"] = zone_config(zone);
            j["n_samples"] = n_samples;
        } else {
            j["b"] = b;
            j["t_max_over_ts"] = t_max;
            j["n_times"] = n_times;
        }
        return j;
    }

    void run(const OutputSink& sink) const {
        if (kind == "circuit") {
            auto z = make_zone(zone);
            auto path = bo::circuit_path(z, n_samples);
            bo::CsvWriter csv(sink.path("figure_circuit.csv"),
                              {"t_over_tau", "X", "Y"});
            for (const auto& s : path) csv.row({s.t, s.X, s.Y});
            json res;
            res["n_samples"] = static_cast<int>(path.size());
            sink.summary("figure", config(), res);
            return;
        }
        if (kind != "widths")
            throw bo::ConfigError("figure kind must be 'circuit' or 'widths'");
        const bo::GaussianPacket ground{1.0, b, 1.0};
        const bo::GaussianPacket excited{1.0, -b, 1.0};
        const bo::GaussianPacket free_p{1.0, 0.0, 1.0};
        bo::CsvWriter csv(sink.path("figure_widths.csv"),
                          {"t_over_ts", "width_ground_dx0",
                           "width_excited_dx0", "width_free_dx0"});
        for (int i = 0; i < n_times; ++i) {
            const double t = t_max * i / (n_times - 1);
            csv.row({t, bo::analytic_width(t, ground),
                     bo::analytic_width(t, excited),
                     bo::analytic_width(t, free_p)});
        }
        auto [wmin, tmin] = bo::min_width(ground);
        json res;
        res["width_min_over_dx0"] = wmin;
        res["t_min_over_ts"] = tmin;
        sink.summary("figure", config(), res);
    }
};

struct SweepCmd {
    ZoneFlags zone;
    double tol = 1e-10;
    std::string methods = "quadrature,closed";
    std::vector<std::string> axis_specs;  // "name=v1,v2,..."
    double k_dx0 = 0.25;
    double alpha = 0.0;
    int n_zones = 2;

    struct Axis {
        std::string name;
        std::vector<double> values;
    };

    std::vector<Axis> axes() const {
        std::vector<Axis> out;
        for (const auto& spec : axis_specs) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw bo::ConfigError("axis spec must be name=v1,v2,...");
            Axis ax;
            ax.name = spec.substr(0, eq);
            if (ax.name != "a" && ax.name != "omega_alpha_tau" &&
                ax.name != "delta_tau" && ax.name != "k_dx0")
                throw bo::ConfigError("unknown sweep axis '" + ax.name + "'");
            for (const auto& v : split(spec.substr(eq + 1), ','))
                ax.values.push_back(std::stod(v));
            if (ax.values.empty())
                throw bo::ConfigError("axis '" + ax.name + "' is empty");
            out.push_back(ax);
        }
        if (out.empty()) throw bo::ConfigError("sweep needs at least one axis");
        return out;
    }

    json config() const {
        json j;
        j["zone"] = zone_config(zone);
        j["tol"] = tol;
        j["methods"] = methods;
        json jax = json::array();
        for (const auto& ax : axes()) {
            json a;
            a["name"] = ax.name;
            a["values"] = ax.values;
            jax.push_back(a);
        }
        j["axes"] = jax;
        j["k_dx0"] = k_dx0;
        j["alpha"] = alpha;
        j["n_zones"] = n_zones;
        return j;
    }

    void run(const OutputSink& sink) const {
        const auto ax = axes();
        const auto method_names = split(methods, ',');
        std::size_t total = 1;
        for (const auto& a : ax) {
            total *= a.values.size();
            if (total > 1000000)
                throw bo::ConfigError("sweep budget exceeded (> 1e6 points)");
        }
        const bool has_kdx0 =
            std::any_of(ax.begin(), ax.end(),
                        [](const Axis& a) { return a.name == "k_dx0"; });

        std::vector<std::string> header;
        for (const auto& a : ax) header.push_back(a.name);
        for (const auto& m : method_names)
            for (const char* field :
                 {"beta_rad", "gamma_rad", "phi_g_rad", "phi_e_rad"})
                header.push_back(m + std::string("_") + field);
        if (method_names.size() > 1) header.push_back("diff_max_rad");
        if (has_kdx0) header.push_back("b_quadratic");

        // one row per lexicographic grid point, computed in parallel,
        // written in declaration order
        std::vector<std::vector<double>> rows(total);
        auto point_values = [&](std::size_t idx) {
            std::vector<double> vals(ax.size());
            std::size_t rem = idx;
            for (std::size_t d = ax.size(); d-- > 0;) {
                vals[d] = ax[d].values[rem % ax[d].values.size()];
                rem /= ax[d].values.size();
            }
            return vals;
        };
        auto compute_row = [&](std::size_t idx) {
            const auto vals = point_values(idx);
            ZoneFlags zf = zone;
            double kdx0 = k_dx0;
            for (std::size_t d = 0; d < ax.size(); ++d) {
                if (ax[d].name == "a") {
                    zf.a = vals[d];
                    zf.rabi_tau = kUnset;
                } else if (ax[d].name == "omega_alpha_tau") {
                    zf.omega_alpha_tau = vals[d];
                } else if (ax[d].name == "delta_tau") {
                    zf.delta_tau = vals[d];
                } else {
                    kdx0 = vals[d];
                }
            }
            auto z = make_zone(zf);
            auto ms = run_methods(z, method_names, tol);
            std::vector<double> row = vals;
            for (const auto& m : ms) {
                row.push_back(m.result.beta);
                row.push_back(m.result.gamma);
                row.push_back(m.result.phi_g);
                row.push_back(m.result.phi_e);
            }
            if (ms.size() > 1) row.push_back(methods_diff_max(ms));
            if (has_kdx0) row.push_back(bo::quadratic_b(z, kdx0, alpha, n_zones));
            rows[idx] = std::move(row);
        };

        const int n_threads = std::max(
            1, std::min<int>(env_threads(), static_cast<int>(total)));
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mutex;
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t]() {
                try {
                    for (std::size_t i = static_cast<std::size_t>(t);
                         i < total; i += static_cast<std::size_t>(n_threads))
                        compute_row(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);

        bo::CsvWriter csv(sink.path("sweep.csv"), header);
        for (const auto& r : rows) csv.row(r);
        json res;
        res["rows"] = static_cast<std::uint64_t>(total);
        res["threads"] = n_threads;
        sink.summary("sweep", config(), res);
    }
};

// --------------------------------------------------- config file handling

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bo::ConfigError("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw bo::ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.contains("schema_version"))
        throw bo::ConfigError("config file: missing schema_version");
    if (doc["schema_version"] != 1)
        throw bo::ConfigError("config file: unsupported schema_version");
    return doc;
}

template <typename T>
void from_cfg(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

void fill_zone(const json& j, ZoneFlags& z) {
    if (!j.contains("zone")) return;
    const json& zj = j.at("zone");
    from_cfg(zj, "envelope", z.envelope);
    from_cfg(zj, "half_window", z.half_window);
    from_cfg(zj, "envelope_file", z.envelope_file);
    if (zj.contains("a") && zj.contains("rabi_tau"))
        throw bo::ConfigError("config zone: give either a or rabi_tau");
    from_cfg(zj, "a", z.a);
    if (zj.contains("rabi_tau")) {
        z.a = kUnset;
        from_cfg(zj, "rabi_tau", z.rabi_tau);
    }
    from_cfg(zj, "delta_tau", z.delta_tau);
    from_cfg(zj, "omega_alpha_tau", z.omega_alpha_tau);
}

void add_zone_flags(CLI::App* cmd, ZoneFlags& z) {
    cmd->add_option("--envelope", z.envelope,
                    "envelope kind: eckart|gaussian|mesa|tabulated");
    cmd->add_option("--half-window", z.half_window,
                    "integration window T/tau (default 40; mesa 1)");
    cmd->add_option("--envelope-file", z.envelope_file,
                    "CSV 'theta,value' table for --envelope tabulated");
    cmd->add_option("--a", z.a, "dimensionless Rabi frequency |Omega|/|Delta|");
    cmd->add_option("--rabi-tau", z.rabi_tau,
                    "|Omega| tau (alternative to --a)");
    cmd->add_option("--delta-tau", z.delta_tau, "detuning Delta tau (signed)");
    cmd->add_option("--omega-alpha-tau", z.omega_alpha_tau,
                    "Doppler product omega_alpha tau");
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    // config file values act as defaults; command-line flags override
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }

    PhasesCmd phases;
    WindingsCmd windings;
    CircuitCmd circuit;
    DynamicsCmd dynamics;
    PacketCmd packet;
    ValidateCmd validate;
    FigureCmd figure;
    SweepCmd sweep;
    std::string out_dir = ".";
    std::string config_opt;

    try {
        if (!config_path.empty()) {
            const json cfg = load_config_file(config_path);
            const json params =
                cfg.contains("params") ? cfg.at("params") : json::object();
            from_cfg(cfg, "out", out_dir);
            fill_zone(params, phases.zone);
            from_cfg(params, "tol", phases.tol);
            from_cfg(params, "methods", phases.methods);
            from_cfg(params, "a", windings.a);
            from_cfg(params, "omega_alpha_tau", windings.omega_alpha_tau);
            from_cfg(params, "n_max", windings.n_max);
            fill_zone(params, circuit.zone);
            from_cfg(params, "n_samples", circuit.n_samples);
            fill_zone(params, dynamics.zone);
            from_cfg(params, "frame", dynamics.frame);
            from_cfg(params, "rtol", dynamics.rtol);
            from_cfg(params, "atol", dynamics.atol);
            from_cfg(params, "n_samples", dynamics.n_samples);
            from_cfg(params, "two_zone", dynamics.two_zone);
            from_cfg(params, "gap", dynamics.gap);
            fill_zone(params, packet.zone);
            from_cfg(params, "b", packet.b);
            from_cfg(params, "k_dx0", packet.k_dx0);
            from_cfg(params, "alpha", packet.alpha);
            from_cfg(params, "n_zones", packet.n_zones);
            from_cfg(params, "t_max_over_ts", packet.t_max);
            from_cfg(params, "n_times", packet.n_times);
            from_cfg(params, "grid_n", packet.grid_n);
            from_cfg(params, "grid_half_width", packet.grid_half_width);
            from_cfg(params, "snapshots", packet.snapshots);
            from_cfg(params, "preset", validate.preset);
            from_cfg(params, "threshold", validate.threshold);
            from_cfg(params, "kind", figure.kind);
            fill_zone(params, figure.zone);
            from_cfg(params, "b", figure.b);
            from_cfg(params, "n_samples", figure.n_samples);
            from_cfg(params, "t_max_over_ts", figure.t_max);
            from_cfg(params, "n_times", figure.n_times);
            fill_zone(params, sweep.zone);
            from_cfg(params, "tol", sweep.tol);
            from_cfg(params, "methods", sweep.methods);
            if (params.contains("axes")) {
                sweep.axis_specs.clear();
                for (const auto& a : params.at("axes")) {
                    std::string spec = a.at("name").get<std::string>() + "=";
                    bool first = true;
                    for (const auto& v : a.at("values")) {
                        if (!first) spec += ",";
                        spec += bo::format_double(v.get<double>());
                        first = false;
                    }
                    sweep.axis_specs.push_back(spec);
                }
            }
        }

        CLI::App app{
            "berryoptics: dynamical and geometric phases of a two-level "
            "atom in shaped standing-wave light fields"};
        app.require_subcommand(1);
        app.set_version_flag("--version", bo::kVersion);

        auto add_common = [&](CLI::App* cmd) {
            cmd->add_option("--config", config_opt,
                            "JSON config file (flags override its values)");
            cmd->add_option("--out", out_dir, "output directory");
        };

        auto* c_phases = app.add_subcommand(
            "phases", "dynamical and geometric phases of one zone");
        add_zone_flags(c_phases, phases.zone);
        c_phases->add_option("--tol", phases.tol, "quadrature tolerance");
        c_phases->add_option("--methods", phases.methods,
                             "comma list: quadrature,closed,weakfield,"
                             "winding,flux");
        add_common(c_phases);

        auto* c_dyn = app.add_subcommand(
            "dynamics",
            "two-level Schroedinger integration and phase extraction");
        add_zone_flags(c_dyn, dynamics.zone);
        c_dyn->add_option("--frame", dynamics.frame, "lab|tilde");
        c_dyn->add_option("--rtol", dynamics.rtol, "relative tolerance");
        c_dyn->add_option("--atol", dynamics.atol, "absolute tolerance");
        c_dyn->add_option("--n-samples", dynamics.n_samples,
                          "trajectory samples (0 = automatic)");
        c_dyn->add_flag("--two-zone", dynamics.two_zone,
                        "blue zone followed by the mirrored red zone");
        c_dyn->add_option("--gap", dynamics.gap,
                          "field-free gap between zones, units of tau");
        add_common(c_dyn);

        auto* c_wind = app.add_subcommand(
            "windings", "per-winding fluxes and their telescoped sums");
        c_wind->add_option("--a", windings.a, "dimensionless Rabi frequency");
        c_wind->add_option("--omega-alpha-tau", windings.omega_alpha_tau,
                           "Doppler product");
        c_wind->add_option("--n-max", windings.n_max,
                           "number of windings (0 = ceil(10 w) + 20)");
        add_common(c_wind);

        auto* c_circ = app.add_subcommand(
            "circuit",
            "parameter-space circuit samples (t, phi, rho, X, Y, Z)");
        add_zone_flags(c_circ, circuit.zone);
        c_circ->add_option("--n-samples", circuit.n_samples, "sample count");
        add_common(c_circ);

        auto* c_packet = app.add_subcommand(
            "packet", "wave-packet focusing: numeric vs analytic widths");
        add_zone_flags(c_packet, packet.zone);
        c_packet->add_option("--b", packet.b,
                             "quadratic-phase strength (omit to imprint the "
                             "full profile from the zone)");
        c_packet->add_option("--k-dx0", packet.k_dx0, "k Delta x_0");
        c_packet->add_option("--alpha", packet.alpha, "half angle (rad)");
        c_packet->add_option("--n-zones", packet.n_zones, "1 or 2");
        c_packet->add_option("--t-max", packet.t_max, "end time, units of t_s");
        c_packet->add_option("--n-times", packet.n_times, "time samples");
        c_packet->add_option("--grid-n", packet.grid_n, "grid points");
        c_packet->add_option("--grid-half-width", packet.grid_half_width,
                             "grid half width, units of dx0 (default auto)");
        c_packet->add_option("--snapshots", packet.snapshots,
                             "comma list of times (t_s) at which to dump the "
                             "packet amplitudes");
        add_common(c_packet);

        auto* c_val = app.add_subcommand(
            "validate",
            "adiabaticity, Raman-Nath, and spontaneous-emission margins");
        c_val->add_option("--preset", validate.preset,
                          "parameter preset: argon");
        c_val->add_option("--wavelength", validate.wavelength, "m");
        c_val->add_option("--velocity", validate.velocity, "m/s");
        c_val->add_option("--alpha", validate.alpha, "rad");
        c_val->add_option("--detuning", validate.detuning, "1/s, signed");
        c_val->add_option("--rabi-peak", validate.rabi_peak, "1/s");
        c_val->add_option("--tau", validate.tau, "s");
        c_val->add_option("--gamma-sp", validate.gamma_sp,
                          "spontaneous rate, 1/s");
        c_val->add_option("--omega-rec", validate.omega_rec,
                          "recoil frequency, 1/s");
        c_val->add_option("--threshold", validate.threshold,
                          "margin threshold for pass flags");
        add_common(c_val);

        auto* c_fig = app.add_subcommand(
            "figure", "plot-ready data: circuit trace or width curves");
        c_fig->add_option("--kind", figure.kind, "circuit|widths");
        add_zone_flags(c_fig, figure.zone);
        c_fig->add_option("--n-samples", figure.n_samples,
                          "circuit sample count");
        c_fig->add_option("--b", figure.b, "widths: focusing parameter");
        c_fig->add_option("--t-max", figure.t_max, "widths: end time (t_s)");
        c_fig->add_option("--n-times", figure.n_times, "widths: time samples");
        add_common(c_fig);

        auto* c_sweep = app.add_subcommand(
            "sweep", "cartesian parameter sweep over the phase methods");
        add_zone_flags(c_sweep, sweep.zone);
        c_sweep->add_option("--tol", sweep.tol, "quadrature tolerance");
        c_sweep->add_option("--methods", sweep.methods, "comma list");
        c_sweep->add_option("--axis", sweep.axis_specs,
                            "axis spec name=v1,v2,... (repeatable; axes "
                            "nest in the given order)");
        c_sweep->add_option("--k-dx0", sweep.k_dx0,
                            "k dx0 base value for the b column");
        c_sweep->add_option("--alpha", sweep.alpha, "half angle (rad)");
        c_sweep->add_option("--n-zones", sweep.n_zones, "b column zone count");
        add_common(c_sweep);

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }

        // timing goes to stderr only, keeping the artifacts byte-reproducible
        const auto t0 = std::chrono::steady_clock::now();
        OutputSink sink(out_dir);
        if (app.got_subcommand(c_phases)) phases.run(sink);
        else if (app.got_subcommand(c_dyn)) dynamics.run(sink);
        else if (app.got_subcommand(c_wind)) windings.run(sink);
        else if (app.got_subcommand(c_circ)) circuit.run(sink);
        else if (app.got_subcommand(c_packet)) packet.run(sink);
        else if (app.got_subcommand(c_val)) validate.run(sink);
        else if (app.got_subcommand(c_fig)) figure.run(sink);
        else if (app.got_subcommand(c_sweep)) sweep.run(sink);
        std::cerr << "completed in "
                  << std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count()
                  << " s\n";
        return 0;
    } catch (const bo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const bo::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const bo::QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << " (partial value "
                  << e.partial_value << ", estimate " << e.error_estimate
                  << ")\n";
        return 3;
    } catch (const bo::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << " at t = "
                  << e.t_fail << " after " << e.steps << " steps ("
                  << e.rejected << " rejected)\n";
        return 3;
    } catch (const bo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
