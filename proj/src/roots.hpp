#pragma once

// Internal 1-D root finding shared by the surface and measure modules.

#include <cmath>
#include <limits>
#include <optional>

namespace quadrix::detail {

/// Newton's method safeguarded by bisection on a bracket [lo, hi] with
/// fn(lo) <= 0 < fn(hi). `fn(x)` returns {value, derivative}; a non-finite
/// value is replaced by `nan_as` (default: treated as lying on the hi side).
/// Returns nullopt if the iteration budget runs out.
template <typename Fn>
std::optional<double> safeguarded_newton(Fn&& fn, double lo, double hi, double guess, double xtol,
                                         int max_iter = 100, double nan_as = 1.0) {
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    double step_prev = hi - lo;
    for (int it = 0; it < max_iter; ++it) {
        auto [f, df] = fn(x);
        if (!std::isfinite(f)) {
            f = nan_as;
            df = 0.0;
        }
        if (f == 0.0) {
            return x;
        }
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        double next;
        bool newton_ok = std::isfinite(df) && df != 0.0;
        if (newton_ok) {
            next = x - f / df;
            newton_ok = next > lo && next < hi && std::fabs(next - x) < 0.75 * step_prev;
        }
        if (!newton_ok) {
            next = 0.5 * (lo + hi);
        }
        step_prev = std::fabs(next - x);
        x = next;
        if (step_prev <= xtol || hi - lo <= xtol) {
            return x;
        }
    }
    return std::nullopt;
}

} // namespace quadrix::detail
