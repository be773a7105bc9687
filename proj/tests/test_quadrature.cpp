#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "berryoptics/quadrature.hpp"
#include "oracles.hpp"

using namespace berryoptics;

TEST_CASE("polynomial and exponential integrals") {
    auto r = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-14);

    auto e = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 2.0);
    CHECK(std::abs(e.value - (std::exp(2.0) - 1.0)) < 1e-12);
    CHECK(e.error_estimate >= 0);
}

TEST_CASE("peaked sech^2 over a wide window") {
    auto f = [](double x) {
        const double q = std::exp(-std::abs(x));
        const double s = 2 * q / (1 + q * q);
        return s * s;
    };
    QuadratureOptions opts;
    opts.abs_tol = opts.rel_tol = 1e-13;
    auto r = integrate_adaptive(f, -40.0, 40.0, opts);
    CHECK(std::abs(r.value - 2.0) < 1e-13);  // integral of sech^2 = 2 tanh(40)
}

TEST_CASE("agrees with the Simpson oracle on random cubics") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng),
                     c3 = coef(rng);
        auto f = [=](double x) {
            return c0 + x * (c1 + x * (c2 + x * c3));
        };
        const double exact = oracles::integrate(f, -1.0, 3.0, 1e-13);
        auto r = integrate_adaptive(f, -1.0, 3.0);
        CHECK(std::abs(r.value - exact) < 1e-10 * (1 + std::abs(exact)));
    }
}

TEST_CASE("non-convergence reports the partial value") {
    QuadratureOptions opts;
    opts.abs_tol = opts.rel_tol = 1e-15;
    opts.max_subdivisions = 12;
    auto f = [](double x) { return std::sin(500.0 * x) * std::exp(x); };
    bool threw = false;
    try {
        integrate_adaptive(f, 0.0, 3.0, opts);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(std::isfinite(e.partial_value));
        CHECK(e.error_estimate > 0);
    }
    CHECK(threw);
}

TEST_CASE("rejects nonpositive tolerances") {
    QuadratureOptions opts;
    opts.abs_tol = 0;
    opts.rel_tol = 0;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, 0.0, 1.0, opts),
                    DomainError);
}
