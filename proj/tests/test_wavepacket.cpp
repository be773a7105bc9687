#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "berryoptics/wavepacket.hpp"

using namespace berryoptics;

namespace {
// t_s = 1, width0 = 1 natural units: hbar/M = width0^2/t_s = 1
constexpr double kHbarOverM = 1.0;

SampledPacket quadratic_imprint(double b, int n = 8192, double hw = 60.0) {
    auto p = make_gaussian_packet(1.0, n, hw);
    p.amps *= (std::complex<double>(0, -0.5) * b * p.grid.square())
                  .exp();
    return p;
}
}  // namespace

TEST_CASE("analytic width and minimum") {
    GaussianPacket p{1.0, 5.0, 1.0};
    CHECK(analytic_width(0.0, p) == doctest::Approx(1.0));
    CHECK(analytic_width(5.0 / 26.0, p) ==
          doctest::Approx(0.19611613513818404).epsilon(1e-14));

    GaussianPacket free_p{1.0, 0.0, 1.0};
    CHECK(analytic_width(1.0, free_p) == doctest::Approx(std::sqrt(2.0)));

    auto [wmin, tmin] = min_width(p);
    CHECK(wmin == doctest::Approx(0.19611613513818404).epsilon(1e-14));
    CHECK(tmin == doctest::Approx(0.19230769230769232).epsilon(1e-14));
    CHECK(analytic_width(tmin, p) == doctest::Approx(wmin).epsilon(1e-14));

    auto [w0, t0] = min_width(free_p);
    CHECK(w0 == 1.0);
    CHECK(t0 == 0.0);
    auto [wneg, tneg] = min_width(GaussianPacket{1.0, -5.0, 1.0});
    CHECK(wneg == 1.0);
    CHECK(tneg == 0.0);

    CHECK_THROWS_AS(analytic_width(-1.0, p), DomainError);
    CHECK_THROWS_AS(analytic_width(1.0, GaussianPacket{-1.0, 0.0, 1.0}),
                    DomainError);
}

TEST_CASE("quadratic_b arithmetic") {
    auto z = ZoneParameters<double>::from_a(10.0, 4 * kPi, 1.8);
    CHECK(quadratic_b(z, 0.25, 0.0, 1) ==
          doctest::Approx(2.5446900494077325).epsilon(1e-12));
    CHECK(quadratic_b(z, 0.25, 0.0, 2) ==
          doctest::Approx(5.089380098815465).epsilon(1e-12));
    auto z0 = ZoneParameters<double>::from_a(10.0, 4 * kPi, 0.0);
    CHECK(quadratic_b(z0, 0.25, 0.0, 1) == 0.0);
    CHECK_THROWS_AS(quadratic_b(z, 0.0, 0.0, 1), DomainError);
    CHECK_THROWS_AS(quadratic_b(z, 0.25, 0.0, 3), DomainError);
}

TEST_CASE("berry phase profile") {
    auto z = ZoneParameters<double>::from_a(10.0, 2.0, 1.0);  // r = 1
    Eigen::ArrayXd grid(5);
    grid << -2.0, -1.0, 0.0, 1.0, 2.0;
    auto prof = berry_phase_profile(z, grid, 0.3, 1);
    CHECK(prof[2] == doctest::Approx(0.0));
    CHECK(prof[1] == doctest::Approx(prof[3]));  // even
    CHECK(prof[0] == doctest::Approx(prof[4]));

    SUBCASE("periodic in k x with period 2 pi") {
        Eigen::ArrayXd g2(2);
        const double kc = 0.3;
        g2 << 1.0, 1.0 + 2 * kPi / kc;
        auto p2 = berry_phase_profile(z, g2, kc, 1);
        CHECK(p2[0] == doctest::Approx(p2[1]).epsilon(1e-12));
    }
    SUBCASE("small-x quadratic limit within 0.02%") {
        Eigen::ArrayXd gs(1);
        const double kc = 0.01;
        gs << 1.0;  // k x cos a = 0.01
        auto ps = berry_phase_profile(z, gs, kc, 1);
        const double quad = -0.5 * z.omega_alpha_tau * 1.0 * kc * kc;
        CHECK(std::abs(ps[0] - quad) < 2e-4 * std::abs(quad));
    }
    SUBCASE("matches -(b/2) x^2 near zero with the n_zones factor") {
        const double k_dx0 = 0.05;
        const double b2 = quadratic_b(z, k_dx0, 0.0, 2);
        Eigen::ArrayXd gx(1);
        gx << 0.1;
        auto pb = berry_phase_profile(z, gx, k_dx0, 2);
        CHECK(pb[0] == doctest::Approx(-0.5 * b2 * 0.01).epsilon(2e-5));
    }
}

TEST_CASE("packet construction and width measurement") {
    auto p = make_gaussian_packet(1.0);
    CHECK(std::abs(p.norm() - 1.0) < 1e-10);
    CHECK(measure_width(p) == doctest::Approx(1.0).epsilon(1e-8));
    // edge amplitude below 1e-8 of the peak
    const double peak = p.amps.abs().maxCoeff();
    CHECK(std::abs(p.amps[0]) < 1e-8 * peak);
    CHECK(p.grid.size() >= 16);

    SUBCASE("unnormalized packet is rejected") {
        SampledPacket z;
        z.grid = Eigen::ArrayXd::LinSpaced(64, -1.0, 1.0);
        z.amps = Eigen::ArrayXcd::Zero(64);
        z.dx = 2.0 / 64;
        CHECK_THROWS_AS(measure_width(z), DomainError);
    }
}

TEST_CASE("free propagation") {
    SUBCASE("t = 0 is the identity") {
        auto p = make_gaussian_packet(1.0);
        auto q = propagate_free(p, 0.0, kHbarOverM);
        CHECK((q.amps - p.amps).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("free Gaussian widens by sqrt(2) at t_s") {
        auto p = make_gaussian_packet(1.0);
        auto q = propagate_free(p, 1.0, kHbarOverM);
        CHECK(measure_width(q) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    }
    SUBCASE("norm is conserved") {
        auto p = quadratic_imprint(5.0);
        for (double t : {0.3, 1.0, 2.0, 5.0}) {
            auto q = propagate_free(p, t, kHbarOverM);
            CHECK(std::abs(q.norm() - 1.0) < 1e-10);
        }
    }
    SUBCASE("quadratic imprint follows the closed-form width") {
        auto p = quadratic_imprint(5.0);
        GaussianPacket gp{1.0, 5.0, 1.0};
        for (int i = 1; i <= 20; ++i) {
            const double t = 2.0 * i / 20.0;
            auto q = propagate_free(p, t, kHbarOverM);
            CHECK(measure_width(q) ==
                  doctest::Approx(analytic_width(t, gp)).epsilon(1e-6));
        }
    }
    SUBCASE("aliasing is detected") {
        auto p = quadratic_imprint(400.0, 256, 12.0);
        CHECK_THROWS_AS(propagate_free(p, 0.1, kHbarOverM), AliasingError);
    }
}

TEST_CASE("excited-state sign flip spreads faster than free") {
    auto pminus = quadratic_imprint(-5.0);
    auto pfree = make_gaussian_packet(1.0, 8192, 60.0);
    for (double t : {0.1, 0.4, 0.8, 1.0}) {
        const double we = measure_width(propagate_free(pminus, t, kHbarOverM));
        const double wf = measure_width(propagate_free(pfree, t, kHbarOverM));
        CHECK(we > wf);
    }
    // analytic counterpart: width minimum of the b < 0 branch sits at t = 0
    GaussianPacket pm{1.0, -5.0, 1.0};
    double prev = analytic_width(0.0, pm);
    for (double t : {0.1, 0.2, 0.5, 1.0}) {
        const double w = analytic_width(t, pm);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("full profile focusing approaches the quadratic prediction") {
    auto run_dev = [](double k_dx0, int n, double hw) {
        const double r = 1.0;
        const double wat = 5.0 / (2 * r * r * k_dx0 * k_dx0);  // b = 5
        auto zone = ZoneParameters<double>::from_a(40.0, wat, r);
        auto p = make_gaussian_packet(1.0, n, hw);
        auto prof = berry_phase_profile(zone, p.grid, k_dx0, 2);
        p.amps *= (std::complex<double>(0, 1) * prof).exp();
        auto q = propagate_free(p, 5.0 / 26.0, kHbarOverM);
        return std::abs(measure_width(q) - 0.19611613513818404) /
               0.19611613513818404;
    };
    const double dev1 = run_dev(0.05, 8192, 60.0);
    CHECK(dev1 < 0.02);
    SUBCASE("deviation scales as (k dx0)^2") {
        const double dev2 = run_dev(0.025, 8192, 60.0);
        CHECK(dev1 / dev2 > 2.8);
        CHECK(dev1 / dev2 < 5.5);
    }
}

TEST_CASE("reference kernel quadrature agrees with the spectral route") {
    auto p = quadratic_imprint(2.0, 1024, 16.0);
    const double t = 0.4;
    auto spec = propagate_free(p, t, kHbarOverM);
    auto ref = propagate_free_reference(p, t, kHbarOverM);
    // compare densities away from the grid edge
    const int n = static_cast<int>(p.grid.size());
    double worst = 0;
    for (int i = n / 8; i < 7 * n / 8; ++i)
        worst = std::max(worst,
                         std::abs(std::abs(spec.amps[i]) - std::abs(ref.amps[i])));
    CHECK(worst < 1e-4);
    CHECK(measure_width(spec) == doctest::Approx(measure_width(ref)).epsilon(1e-4));
}
