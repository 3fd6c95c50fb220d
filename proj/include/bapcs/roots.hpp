#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace bapcs {

struct RootOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_iter = 200;
};

/// Brent's method on a sign-changing bracket [a, b].
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb, const RootOptions& opt = {}) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw std::invalid_argument("brent_root: endpoints do not bracket a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < opt.max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * opt.rel_tol * std::fabs(b) + 0.5 * opt.abs_tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol || fb == 0.0) return b;
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += std::fabs(d) > tol ? d : (xm > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

/// Expand a bracket geometrically from x0 until f changes sign, then solve with Brent.
/// The function must be strictly monotone on (lo_limit, hi_limit).
template <typename F>
double solve_monotone(F&& f, double x0, double lo_limit, double hi_limit, const RootOptions& opt = {}) {
    if (!(x0 > lo_limit && x0 < hi_limit)) throw std::invalid_argument("solve_monotone: bad initial point");
    double a = x0, b = x0, fa = f(x0), fb = fa;
    if (fa == 0.0) return x0;
    const bool increasing_needed = fa < 0.0;
    for (int it = 0; it < 200 && (fa > 0.0) == (fb > 0.0); ++it) {
        // walk in the direction that can change the sign, trying both ends
        bool moved = false;
        if (b < hi_limit) {
            b = std::fmin(b * 4.0, hi_limit);
            fb = f(b);
            moved = true;
        }
        if ((fa > 0.0) == (fb > 0.0) && a > lo_limit) {
            a = std::fmax(a / 4.0, lo_limit);
            fa = f(a);
            moved = true;
        }
        if (!moved) break;
    }
    (void)increasing_needed;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::runtime_error("solve_monotone: no sign change within limits");
    return brent_root(f, a, b, fa, fb, opt);
}

} // namespace bapcs
