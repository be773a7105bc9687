#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "berryoptics/circuit.hpp"
#include "oracles.hpp"

using namespace berryoptics;
using Eigen::Matrix2cd;
using Eigen::Vector2cd;

namespace {
Matrix2cd berry_hamiltonian(double X, double Y, double Z) {
    Matrix2cd h;
    h << Z, std::complex<double>(X, -Y), std::complex<double>(X, Y), -Z;
    return 0.5 * h;
}
}  // namespace

TEST_CASE("circuit_path geometry") {
    auto z = ZoneParameters<double>::from_a(10.0, 2.0, 1.0);
    auto path = circuit_path(z, 801);
    for (const auto& s : path) {
        CHECK(s.X == doctest::Approx(s.rho * std::cos(s.phi)).epsilon(1e-15));
        CHECK(s.Y == doctest::Approx(-s.rho * std::sin(s.phi)).epsilon(1e-15));
        CHECK(s.Z == 1.0);
        CHECK(s.phi == doctest::Approx(2.0 * s.t));
    }
    // center sample: rho = a, phi = 0
    const auto& mid = path[400];
    CHECK(mid.t == doctest::Approx(0.0));
    CHECK(mid.rho == doctest::Approx(1.0));
    CHECK(mid.X == doctest::Approx(1.0));
    CHECK(mid.Y == doctest::Approx(0.0));

    SUBCASE("zero field collapses to the origin") {
        auto z0 = ZoneParameters<double>::from_a(10.0, 2.0, 0.0);
        for (const auto& s : circuit_path(z0, 11)) {
            CHECK(s.rho == 0.0);
            CHECK(s.X == 0.0);
            CHECK(s.Y == 0.0);
        }
    }
    SUBCASE("mesa circuit is a circle of radius a") {
        auto zm = ZoneParameters<double>::from_a(-5.0, 2 * kPi, 0.7,
                                                 Envelope<double>::mesa(1.0));
        for (const auto& s : circuit_path(zm, 101)) {
            CHECK(std::hypot(s.X, s.Y) == doctest::Approx(0.7));
            CHECK(s.Z == -1.0);
        }
    }
    CHECK_THROWS_AS(circuit_path(z, 1), DomainError);
}

TEST_CASE("dressed states on the Z axis recover the atomic mapping") {
    auto up = dressed_states(0.0, 0.0, 1.0);  // Delta > 0
    CHECK(up.state_plus(0) == std::complex<double>(1, 0));   // |e>
    CHECK(up.state_plus(1) == std::complex<double>(0, 0));
    CHECK(up.state_minus(0) == std::complex<double>(0, 0));  // |g>
    CHECK(std::abs(up.state_minus(1) - std::complex<double>(1, 0)) < 1e-15);
    CHECK(up.eps_plus == doctest::Approx(0.5));
    CHECK(up.eps_minus == doctest::Approx(-0.5));

    auto dn = dressed_states(0.0, 0.0, -1.0);  // Delta < 0
    CHECK(std::abs(dn.state_plus(1) - std::complex<double>(1, 0)) < 1e-15);
    CHECK(std::abs(dn.state_minus(0) - std::complex<double>(-1, 0)) < 1e-15);

    auto eq = dressed_states(1.0, 0.0, 0.0);
    CHECK(eq.eps_plus == doctest::Approx(0.5));
    CHECK(eq.state_plus(0).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(eq.state_plus(1).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(eq.state_minus(0).real() == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(eq.state_minus(1).real() == doctest::Approx(1 / std::sqrt(2.0)));

    CHECK_THROWS_AS(dressed_states(0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("dressed states are eigenpairs on random shells") {
    std::mt19937 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
        if (v.norm() < 1e-6) continue;
        v.normalize();
        auto d = dressed_states(v[0], v[1], v[2]);
        auto H = berry_hamiltonian(v[0], v[1], v[2]);
        worst = std::max(worst,
                         (H * d.state_plus - d.eps_plus * d.state_plus)
                             .cwiseAbs()
                             .maxCoeff());
        worst = std::max(worst,
                         (H * d.state_minus - d.eps_minus * d.state_minus)
                             .cwiseAbs()
                             .maxCoeff());
        CHECK(std::abs(d.state_plus.norm() - 1.0) < 1e-12);
        CHECK(std::abs(d.state_minus.norm() - 1.0) < 1e-12);
        CHECK(std::abs(d.state_plus.dot(d.state_minus)) < 1e-12);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("dressed mapping is continuous along a turn-off path") {
    for (double zsign : {1.0, -1.0}) {
        Vector2cd prev_p, prev_m;
        bool first = true;
        for (double rho = 0.3; rho > 1e-14; rho *= 0.5) {
            auto d = dressed_states(rho, 0.0, zsign);
            if (!first) {
                CHECK((d.state_plus - prev_p).norm() < 0.3);
                CHECK((d.state_minus - prev_m).norm() < 0.3);
            }
            prev_p = d.state_plus;
            prev_m = d.state_minus;
            first = false;
        }
        auto lim = dressed_states(0.0, 0.0, zsign);
        CHECK((prev_p - lim.state_plus).norm() < 1e-6);
        CHECK((prev_m - lim.state_minus).norm() < 1e-6);
    }
}

TEST_CASE("winding phases") {
    SUBCASE("zero field carries zero flux") {
        for (long m : {1L, 2L, 100L, 1000000L})
            CHECK(winding_phase(m, 0.0, 1.0) == 0.0);
    }
    SUBCASE("first winding at a = 1, w tau = 1") {
        // frozen from 40-digit evaluation of the closed F_m expression and
        // independent direct integration of the flux integrand
        CHECK(winding_phase(1, 1.0, 1.0) ==
              doctest::Approx(-0.34471481202319662).epsilon(1e-12));
        CHECK(winding_phase(2, 1.0, 1.0) ==
              doctest::Approx(-0.0018552909448233662).epsilon(1e-10));
    }
    SUBCASE("direct flux integral oracle") {
        // gamma^(1) = w Int_0^{pi/w} (cosh/sqrt(cosh^2+a^2) - 1) dtheta
        const double a = 1.0, w = 1.0;
        const double oracle = w * oracles::integrate(
            [&](double th) {
                const double c = std::cosh(th);
                return c / std::sqrt(c * c + a * a) - 1.0;
            },
            0.0, kPi / w, 1e-13);
        CHECK(winding_phase(1, a, w) == doctest::Approx(oracle).epsilon(1e-11));
    }
    SUBCASE("fluxes decay monotonically to zero") {
        double prev = -1e9;
        for (long m = 1; m <= 12; ++m) {
            const double g = winding_phase(m, 1.0, 1.0);
            CHECK(g < 0.0);
            CHECK(g > prev);
            prev = g;
        }
        CHECK(std::abs(winding_phase(1000000L, 1.0, 1.0)) < 1e-300);
        CHECK(std::isfinite(winding_phase(1000000L, 5.0, 4 * kPi)));
    }
    CHECK_THROWS_AS(winding_phase(0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(winding_phase(1, 1.0, 0.0), DomainError);
}

TEST_CASE("winding sums telescope and converge to the closed form") {
    SUBCASE("telescoped equals direct summation") {
        for (double w : {1.0, 4 * kPi}) {
            double direct = 0;
            for (long m = 1; m <= 100; ++m) direct += winding_phase(m, 1.0, w);
            CHECK(std::abs(winding_sum(100, 1.0, w).partial_sum - direct) <
                  1e-12);
        }
    }
    SUBCASE("partial sums reach the closed form") {
        for (double w : {1.0, 4 * kPi}) {
            const long N = static_cast<long>(std::ceil(10 * w)) + 20;
            auto s = winding_sum(N, 1.0, w);
            CHECK(std::abs(s.partial_sum - eckart_geometric_phase(1.0, w)) <
                  1e-8);
        }
    }
    SUBCASE("extrapolated limit beats the partial sum") {
        auto s = winding_sum(5, 1.0, 1.0);
        const double exact = eckart_geometric_phase(1.0, 1.0);
        CHECK(std::abs(s.extrapolated_limit - exact) <
              std::abs(s.partial_sum - exact));
    }
    SUBCASE("zero field") {
        auto s = winding_sum(7, 0.0, 1.0);
        CHECK(s.partial_sum == 0.0);
        CHECK(s.extrapolated_limit == 0.0);
    }
}

TEST_CASE("surface flux quadrature") {
    SUBCASE("matches the Eckart closed form") {
        auto z = ZoneParameters<double>::from_a(10.0, 1.0, 1.0);
        auto r = surface_flux_quadrature(z, 1e-12);
        CHECK(std::abs(r.value - eckart_geometric_phase(1.0, 1.0)) < 1e-10);
    }
    SUBCASE("zero field") {
        auto z = ZoneParameters<double>::from_a(10.0, 1.0, 0.0);
        CHECK(surface_flux_quadrature(z).value == doctest::Approx(0.0));
    }
    SUBCASE("one-turn mesa circle reproduces the cone solid angle") {
        // window [-T,T] with omega_alpha tau * 2T = 2 pi: a single circle
        const double a = 0.7, W = 1.0, wat = kPi / W;
        auto z = ZoneParameters<double>::from_a(10.0, wat, a,
                                                Envelope<double>::mesa(W));
        const double expected = -kPi * (1.0 - 1.0 / std::sqrt(1.0 + a * a));
        auto r = surface_flux_quadrature(z, 1e-12);
        CHECK(r.value == doctest::Approx(expected).epsilon(1e-10));
        // brute-force monopole flux over the same disc
        CHECK(-oracles::disc_flux(a) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("three routes to gamma agree pairwise") {
    for (double a : {0.3, 1.0, 3.0}) {
        for (double w : {0.5, 2.0, 12.0}) {
            auto z = ZoneParameters<double>::from_a(10.0, w, a);
            const double closed = eckart_geometric_phase(a, w);
            const long N = static_cast<long>(std::ceil(10 * w)) + 20;
            const double winding = winding_sum(N, a, w).partial_sum;
            const double flux = surface_flux_quadrature(z, 1e-12).value;
            CHECK(std::abs(winding - closed) < 1e-8);
            CHECK(std::abs(flux - closed) < 1e-8);
            CHECK(std::abs(flux - winding) < 1e-8);
        }
    }
}
