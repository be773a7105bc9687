#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "berryoptics/errors.hpp"

namespace berryoptics {

enum class EnvelopeKind { Eckart, Mesa, Gaussian, Tabulated };

inline const char* to_string(EnvelopeKind k) {
    switch (k) {
        case EnvelopeKind::Eckart: return "eckart";
        case EnvelopeKind::Mesa: return "mesa";
        case EnvelopeKind::Gaussian: return "gaussian";
        case EnvelopeKind::Tabulated: return "tabulated";
    }
    return "?";
}

/// Longitudinal field profile f(theta), theta = t/tau dimensionless.
/// Peak-normalized (max f = 1) and even in theta; the field strength lives in
/// the Rabi prefactor, not here. `half_window` is the integration cutoff T/tau
/// (finite support for Mesa/Tabulated, tail truncation for Eckart/Gaussian);
/// `tail_decay` is the exponential decay rate of the tail where one exists.
template <typename Scalar = double>
class Envelope {
public:
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    static Envelope eckart(Scalar half_window = Scalar(40)) {
        Envelope e;
        e.kind_ = EnvelopeKind::Eckart;
        e.half_window_ = check_window(half_window);
        e.tail_decay_ = Scalar(1);
        return e;
    }

    static Envelope gaussian(Scalar half_window = Scalar(40)) {
        Envelope e;
        e.kind_ = EnvelopeKind::Gaussian;
        e.half_window_ = check_window(half_window);
        e.tail_decay_ = std::numeric_limits<Scalar>::infinity();
        return e;
    }

    static Envelope mesa(Scalar half_window = Scalar(1)) {
        Envelope e;
        e.kind_ = EnvelopeKind::Mesa;
        e.half_window_ = check_window(half_window);
        e.tail_decay_ = std::numeric_limits<Scalar>::infinity();
        return e;
    }

    /// Tabulated profile on theta >= 0, evenly extended; monotone cubic
    /// (Fritsch-Carlson) interpolation, zero outside the last node, values
    /// rescaled so that max f = 1.
    static Envelope tabulated(const Array& theta, const Array& values) {
        if (theta.size() != values.size() || theta.size() < 2)
            throw DomainError("tabulated envelope needs >= 2 matching samples");
        if (theta[0] != Scalar(0))
            throw DomainError("tabulated envelope must start at theta = 0");
        for (Eigen::Index i = 1; i < theta.size(); ++i)
            if (!(theta[i] > theta[i - 1]))
                throw DomainError("tabulated envelope abscissae must increase");
        if ((values < Scalar(0)).any())
            throw DomainError("tabulated envelope values must be nonnegative");
        const Scalar peak = values.maxCoeff();
        if (!(peak > Scalar(0)))
            throw DomainError("tabulated envelope must not vanish identically");

        Envelope e;
        e.kind_ = EnvelopeKind::Tabulated;
        e.half_window_ = theta[theta.size() - 1];
        e.tail_decay_ = std::numeric_limits<Scalar>::infinity();
        e.xs_ = theta;
        e.ys_ = values / peak;
        e.slopes_ = pchip_slopes(e.xs_, e.ys_);
        return e;
    }

    Scalar operator()(Scalar theta) const {
        const Scalar u = std::abs(theta);
        switch (kind_) {
            case EnvelopeKind::Eckart: {
                // sech(u) written to stay finite for any u
                const Scalar q = std::exp(-u);
                return Scalar(2) * q / (Scalar(1) + q * q);
            }
            case EnvelopeKind::Gaussian:
                return std::exp(-u * u / Scalar(2));
            case EnvelopeKind::Mesa:
                return u <= half_window_ ? Scalar(1) : Scalar(0);
            case EnvelopeKind::Tabulated:
                return eval_pchip(u);
        }
        return Scalar(0);
    }

    EnvelopeKind kind() const { return kind_; }
    Scalar half_window() const { return half_window_; }
    Scalar tail_decay() const { return tail_decay_; }

private:
    Envelope() = default;

    static Scalar check_window(Scalar w) {
        if (!(w > Scalar(0))) throw DomainError("envelope half_window must be > 0");
        return w;
    }

    // Fritsch-Carlson shape-preserving node slopes.
    static Array pchip_slopes(const Array& x, const Array& y) {
        const Eigen::Index n = x.size();
        Array h(n - 1), d(n - 1), m(n);
        for (Eigen::Index i = 0; i < n - 1; ++i) {
            h[i] = x[i + 1] - x[i];
            d[i] = (y[i + 1] - y[i]) / h[i];
        }
        if (n == 2) {
            m[0] = m[1] = d[0];
            return m;
        }
        for (Eigen::Index i = 1; i < n - 1; ++i) {
            if (d[i - 1] * d[i] <= Scalar(0)) {
                m[i] = Scalar(0);
            } else {
                const Scalar w1 = Scalar(2) * h[i] + h[i - 1];
                const Scalar w2 = h[i] + Scalar(2) * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
        m[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        return m;
    }

    static Scalar endpoint_slope(Scalar h0, Scalar h1, Scalar d0, Scalar d1) {
        Scalar m = ((Scalar(2) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= Scalar(0)) return Scalar(0);
        if (d0 * d1 < Scalar(0) && std::abs(m) > Scalar(3) * std::abs(d0))
            return Scalar(3) * d0;
        return m;
    }

    Scalar eval_pchip(Scalar u) const {
        const Eigen::Index n = xs_.size();
        if (u >= xs_[n - 1]) return u == xs_[n - 1] ? ys_[n - 1] : Scalar(0);
        Eigen::Index lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const Eigen::Index mid = (lo + hi) / 2;
            (xs_[mid] <= u ? lo : hi) = mid;
        }
        const Scalar h = xs_[lo + 1] - xs_[lo];
        const Scalar t = (u - xs_[lo]) / h;
        const Scalar t2 = t * t, t3 = t2 * t;
        const Scalar h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const Scalar h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * ys_[lo] + h * h10 * slopes_[lo] + h01 * ys_[lo + 1] +
               h * h11 * slopes_[lo + 1];
    }

    EnvelopeKind kind_ = EnvelopeKind::Eckart;
    Scalar half_window_ = Scalar(40);
    Scalar tail_decay_ = Scalar(1);
    Array xs_, ys_, slopes_;
};

}  // namespace berryoptics
