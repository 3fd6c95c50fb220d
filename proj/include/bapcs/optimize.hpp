#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bapcs {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Nelder-Mead minimization with standard coefficients.
/// Converges when the simplex diameter falls below rel_tol * (1 + |best vertex|), or,
/// if f_stall_tol > 0, when the worst-to-best value spread falls below f_stall_tol.
/// The stall rule exists for objectives whose optimum is an asymptotically flat ridge,
/// where the diameter rule would wander arbitrarily far before the values tie.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double step = 0.5,
                                 double rel_tol = 1e-8, int max_iter = 20000,
                                 double f_stall_tol = 0.0) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("nelder_mead: empty start point");
    std::vector<std::vector<double>> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

    auto diameter = [&]() {
        double dmax = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j) dmax = std::fmax(dmax, std::fabs(pts[i][j] - pts[0][j]));
        return dmax;
    };
    auto scale = [&]() {
        double s = 1.0;
        for (std::size_t j = 0; j < d; ++j) s = std::fmax(s, std::fabs(pts[0][j]));
        return s;
    };

    SimplexResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        // order vertices by value
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2(d + 1);
        std::vector<double> f2(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            p2[i] = pts[ord[i]];
            f2[i] = fv[ord[i]];
        }
        pts.swap(p2);
        fv.swap(f2);

        if (diameter() < rel_tol * scale() || (f_stall_tol > 0.0 && fv[d] - fv[0] < f_stall_tol)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[i][j] / static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> p(d);
            for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + coef * (pts[d][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                pts[d] = xe; fv[d] = fe;
            } else {
                pts[d] = xr; fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            pts[d] = xr; fv[d] = fr;
        } else {
            const bool outside = fr < fv[d];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[d])) {
                pts[d] = xc; fv[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    res.x = pts[0];
    res.value = fv[0];
    res.iterations = it;
    return res;
}

} // namespace bapcs
