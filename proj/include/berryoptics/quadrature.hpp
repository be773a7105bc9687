#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "berryoptics/errors.hpp"

namespace berryoptics {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 10000;
    int initial_panels = 8;  // pre-split; the integrands here peak at theta = 0
};

template <typename Scalar = double>
struct QuadratureResult {
    Scalar value;
    Scalar error_estimate;
    int subdivisions;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights (positive half; QUADPACK values).
template <typename Scalar>
struct GK15 {
    static constexpr Scalar nodes[8] = {
        Scalar(0.991455371120812639206854697526329L),
        Scalar(0.949107912342758524526189684047851L),
        Scalar(0.864864423359769072789712788640926L),
        Scalar(0.741531185599394439863864773280788L),
        Scalar(0.586087235467691130294144838258730L),
        Scalar(0.405845151377397166906606412076961L),
        Scalar(0.207784955007898467600689403773245L),
        Scalar(0.0L)};
    static constexpr Scalar wk[8] = {
        Scalar(0.022935322010529224963732008058970L),
        Scalar(0.063092092629978553290700663189204L),
        Scalar(0.104790010322250183839876322541518L),
        Scalar(0.140653259715525918745189590510238L),
        Scalar(0.169004726639267902826583426598550L),
        Scalar(0.190350578064785409913256402421014L),
        Scalar(0.204432940075298892414161999234649L),
        Scalar(0.209482141084727828012999174891714L)};
    // Gauss-7 weights sit on the odd Kronrod nodes (indices 1,3,5,7).
    static constexpr Scalar wg[4] = {
        Scalar(0.129484966168869693270611432679082L),
        Scalar(0.279705391489276667901467771423780L),
        Scalar(0.381830050505118944950369775488975L),
        Scalar(0.417959183673469387755102040816327L)};
};

template <typename Scalar, typename F>
void gk15_panel(F& f, Scalar lo, Scalar hi, Scalar& value, Scalar& error) {
    using T = GK15<Scalar>;
    const Scalar c = (lo + hi) / 2;
    const Scalar half = (hi - lo) / 2;
    Scalar resk = T::wk[7] * f(c);
    Scalar resg = T::wg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const Scalar dx = half * T::nodes[i];
        const Scalar fsum = f(c - dx) + f(c + dx);
        resk += T::wk[i] * fsum;
        if (i % 2 == 1) resg += T::wg[i / 2] * fsum;
    }
    value = resk * half;
    // |K - G| is the Gauss-rule error, a conservative bound for the Kronrod value.
    error = std::abs((resk - resg) * half);
}

template <typename Scalar>
struct Segment {
    Scalar lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [lo, hi].
/// Terminates when sum(errors) <= max(abs_tol, rel_tol*|value|) or when every
/// segment has hit the roundoff floor; throws QuadratureError (carrying the
/// partial value) if the subdivision budget runs out first.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar lo, Scalar hi,
                                            const QuadratureOptions& opts = {}) {
    if (!(opts.abs_tol > 0) && !(opts.rel_tol > 0))
        throw DomainError("quadrature tolerance must be positive");
    if (hi == lo) return {Scalar(0), Scalar(0), 0};
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();

    std::priority_queue<detail::Segment<Scalar>> active;
    std::vector<detail::Segment<Scalar>> floored;
    Scalar total = 0, total_err = 0;
    const int panels = std::max(1, opts.initial_panels);
    for (int i = 0; i < panels; ++i) {
        detail::Segment<Scalar> s;
        s.lo = lo + (hi - lo) * Scalar(i) / Scalar(panels);
        s.hi = lo + (hi - lo) * Scalar(i + 1) / Scalar(panels);
        detail::gk15_panel(f, s.lo, s.hi, s.value, s.error);
        total += s.value;
        total_err += s.error;
        active.push(s);
    }

    int n_sub = panels;
    auto tolerance = [&](Scalar v) {
        return std::max(Scalar(opts.abs_tol), Scalar(opts.rel_tol) * std::abs(v));
    };
    while (total_err > tolerance(total) && !active.empty()) {
        if (n_sub >= opts.max_subdivisions) {
            throw QuadratureError("quadrature did not converge within " +
                                      std::to_string(opts.max_subdivisions) +
                                      " subdivisions",
                                  static_cast<double>(total),
                                  static_cast<double>(total_err));
        }
        detail::Segment<Scalar> s = active.top();
        active.pop();
        const Scalar mid = (s.lo + s.hi) / 2;
        const Scalar floor =
            Scalar(50) * eps * (std::abs(s.value) + eps * std::abs(total));
        if (s.error <= floor || mid <= s.lo || mid >= s.hi) {
            floored.push_back(s);  // machine-precision limited, leave as is
            continue;
        }
        detail::Segment<Scalar> l{s.lo, mid, 0, 0}, r{mid, s.hi, 0, 0};
        detail::gk15_panel(f, l.lo, l.hi, l.value, l.error);
        detail::gk15_panel(f, r.lo, r.hi, r.value, r.error);
        total += l.value + r.value - s.value;
        total_err += l.error + r.error - s.error;
        active.push(l);
        active.push(r);
        ++n_sub;
    }

    // Deterministic compensated resummation, left to right.
    std::vector<detail::Segment<Scalar>> segs = std::move(floored);
    while (!active.empty()) {
        segs.push_back(active.top());
        active.pop();
    }
    std::sort(segs.begin(), segs.end(),
              [](const auto& a, const auto& b) { return a.lo < b.lo; });
    Scalar sum = 0, comp = 0, err = 0;
    for (const auto& s : segs) {
        const Scalar t = sum + s.value;
        if (std::abs(sum) >= std::abs(s.value))
            comp += (sum - t) + s.value;
        else
            comp += (s.value - t) + sum;
        sum = t;
        err += s.error;
    }
    return {sum + comp, err, n_sub};
}

}  // namespace berryoptics
