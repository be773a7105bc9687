#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "berryoptics/errors.hpp"

namespace berryoptics {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0;  // 0: automatic
    long max_steps = 2000000;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
};

/// Embedded Dormand-Prince 5(4) pair with the standard quartic dense-output
/// interpolant. State is a fixed-size Eigen vector; the right-hand side is
/// f(t, y, dydt).
template <int N>
class Dopri5 {
public:
    using Vec = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<void(double, const Vec&, Vec&)>;

    Dopri5(Rhs rhs, OdeOptions opts = {}) : f_(std::move(rhs)), opts_(opts) {
        if (!(opts_.rtol > 0) || !(opts_.atol > 0))
            throw DomainError("ode tolerances must be positive");
    }

    /// Integrate from (t0, y0) to t1, calling `observer(t, y)` at each of the
    /// strictly increasing sample times (dense output, no extra steps).
    template <typename Observer>
    Vec integrate(double t0, const Vec& y0, double t1,
                  const std::vector<double>& sample_times, Observer&& observer) {
        if (!(t1 > t0)) throw DomainError("ode: t1 must exceed t0");
        Vec y = y0, k1, k2, k3, k4, k5, k6, k7, ynew, yerr;
        double t = t0;
        f_(t, y, k1);
        double h = opts_.h_init > 0 ? opts_.h_init
                                    : initial_step(y0, k1, t1 - t0);
        stats_ = {};
        size_t isample = 0;
        while (isample < sample_times.size() && sample_times[isample] <= t0) {
            observer(sample_times[isample], y0);
            ++isample;
        }

        const double dir = 1.0;
        while (dir * (t1 - t) > 0) {
            if (stats_.steps >= opts_.max_steps)
                throw SolverError("ode step budget exhausted", t, stats_.steps,
                                  stats_.rejected);
            if (std::abs(h) < 16 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::abs(t), 1.0))
                throw SolverError("ode step size underflow", t, stats_.steps,
                                  stats_.rejected);
            if (dir * (t + h - t1) > 0) h = t1 - t;

            step(t, y, h, k1, k2, k3, k4, k5, k6, k7, ynew, yerr);
            const double err = error_norm(y, ynew, yerr);
            if (err <= 1.0) {
                // accepted: serve dense output inside (t, t+h]
                while (isample < sample_times.size() &&
                       dir * (sample_times[isample] - (t + h)) <= 0) {
                    const double ts = sample_times[isample];
                    if (dir * (ts - t) > 0)
                        observer(ts, dense_eval(t, y, h, k1, k7, ynew, ts));
                    ++isample;
                }
                t += h;
                y = ynew;
                k1 = k7;  // FSAL
                ++stats_.steps;
            } else {
                ++stats_.rejected;
            }
            const double fac =
                0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::clamp(fac, 0.2, 5.0);
        }
        for (; isample < sample_times.size(); ++isample)
            observer(sample_times[isample], y);
        return y;
    }

    const OdeStats& stats() const { return stats_; }

private:
    void step(double t, const Vec& y, double h, const Vec& k1, Vec& k2, Vec& k3,
              Vec& k4, Vec& k5, Vec& k6, Vec& k7, Vec& ynew, Vec& yerr) {
        f_(t + h / 5, (y + h / 5 * k1).eval(), k2);
        f_(t + 3 * h / 10, (y + h * (3. / 40 * k1 + 9. / 40 * k2)).eval(), k3);
        f_(t + 4 * h / 5,
           (y + h * (44. / 45 * k1 - 56. / 15 * k2 + 32. / 9 * k3)).eval(), k4);
        f_(t + 8 * h / 9,
           (y + h * (19372. / 6561 * k1 - 25360. / 2187 * k2 +
                     64448. / 6561 * k3 - 212. / 729 * k4))
               .eval(),
           k5);
        f_(t + h,
           (y + h * (9017. / 3168 * k1 - 355. / 33 * k2 + 46732. / 5247 * k3 +
                     49. / 176 * k4 - 5103. / 18656 * k5))
               .eval(),
           k6);
        ynew = y + h * (35. / 384 * k1 + 500. / 1113 * k3 + 125. / 192 * k4 -
                        2187. / 6784 * k5 + 11. / 84 * k6);
        f_(t + h, ynew, k7);
        yerr = h * (71. / 57600 * k1 - 71. / 16695 * k3 + 71. / 1920 * k4 -
                    17253. / 339200 * k5 + 22. / 525 * k6 - 1. / 40 * k7);
        // stash for dense output
        k3_ = k3; k4_ = k4; k5_ = k5; k6_ = k6;
    }

    double error_norm(const Vec& y0, const Vec& y1, const Vec& e) const {
        double s = 0;
        for (int i = 0; i < N; ++i) {
            const double sc = opts_.atol + opts_.rtol *
                                               std::max(std::abs(y0[i]),
                                                        std::abs(y1[i]));
            s += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(s / N);
    }

    Vec dense_eval(double t, const Vec& y, double h, const Vec& k1,
                   const Vec& k7, const Vec& ynew, double ts) const {
        // Hairer's contd5 coefficients
        const double d1 = -12715105075. / 11282082432.;
        const double d3 = 87487479700. / 32700410799.;
        const double d4 = -10690763975. / 1880347072.;
        const double d5 = 701980252875. / 199316789632.;
        const double d6 = -1453857185. / 822651844.;
        const double d7 = 69997945. / 29380423.;
        const double th = (ts - t) / h, th1 = 1.0 - th;
        const Vec ydiff = ynew - y;
        const Vec bspl = h * k1 - ydiff;
        const Vec r5 = h * (d1 * k1 + d3 * k3_ + d4 * k4_ + d5 * k5_ +
                            d6 * k6_ + d7 * k7);
        return y + th * (ydiff + th1 * (bspl + th * (ydiff - h * k7 - bspl +
                                                     th1 * r5)));
    }

    static double initial_step(const Vec& y0, const Vec& f0, double span) {
        const double d0 = y0.norm(), d1 = f0.norm();
        const double h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
        return std::min(h, span / 10);
    }

    Rhs f_;
    OdeOptions opts_;
    OdeStats stats_;
    Vec k3_, k4_, k5_, k6_;
};

}  // namespace berryoptics
