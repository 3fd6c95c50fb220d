#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymptotic.hpp"
#include "censoring.hpp"
#include "distributions.hpp"
#include "mle.hpp"
#include "rng.hpp"

namespace bapcs {

/// All Monte Carlo draws produced by Algorithm 1.
struct PivotalDraws {
    int n = 0;
    std::vector<double> beta;
    std::vector<std::vector<double>> alpha; // one series per facility
    std::vector<double> alpha_weighted;
    std::vector<double> reliability;
    std::vector<double> hazard;
    std::vector<double> mtf;
};

/// Point estimates, variances, and generalized confidence intervals from the draws.
struct PivotalSummary {
    int n_draws = 0;
    std::vector<TargetEstimate> targets; // beta, alpha_1..alpha_k, alpha, R(t), H(t), MTF
};

namespace detail {

/// Per-facility constants reused across pivot evaluations: lt_j = log(t_j) with
/// t_j = T_j/(1+T_j), the spacing coefficients w_j = 1 + r_j, and the risk-set
/// coefficients gamma_j = n - sum_{l<j} w_l.
struct PivotCache {
    struct Facility {
        int m = 0;
        std::vector<double> lt;
        std::vector<double> w;
        std::vector<double> gamma;
    };
    std::vector<Facility> fac;
    int df_total = 0; // 2 * sum(m_i - 1)
};

inline PivotCache build_pivot_cache(const BapcsSample& sample) {
    PivotCache cache;
    for (const FacilitySample& f : sample.facilities) {
        const int m = static_cast<int>(f.times.size());
        if (m < 2) throw std::invalid_argument("pivot: every facility needs at least 2 failures");
        PivotCache::Facility pf;
        pf.m = m;
        const auto reff = effective_removals(f.plan, f.j_count);
        double used = 0.0;
        for (int j = 0; j < m; ++j) {
            pf.lt.push_back(log_ratio(f.times[static_cast<std::size_t>(j)]));
            pf.w.push_back(1.0 + reff[static_cast<std::size_t>(j)]);
            pf.gamma.push_back(static_cast<double>(f.plan.n) - used);
            used += pf.w.back();
        }
        cache.df_total += 2 * (m - 1);
        cache.fac.push_back(std::move(pf));
    }
    return cache;
}

/// Evaluates the pivot P(beta) = sum_i [-2 sum_{j<m} log(W_ij/W_im)], optionally its
/// derivative, and optionally Phi_i = W_im per facility. Each W_ij is carried as
/// log W_ij = q_j + log(sum_{l<j} w_l e^{q_l - q_j} + gamma_j) with q_j = log(negL_j),
/// where negL_j = -log(1 - (t_j/(1+t_j))^beta); the spacings negL_j span hundreds of
/// orders of magnitude at large beta, so the running prefix sum is rescaled to the
/// current q_j (q is nondecreasing, hence every rescale factor is <= 1). Once
/// beta*lt_j < -37.5, negL_j equals exp(beta*lt_j) to full double precision, giving
/// q_j = beta*lt_j directly even where exp itself would underflow.
inline double pivot_eval(const PivotCache& cache, double beta, double* dp_out,
                         std::vector<double>* phi_out) {
    double p = 0.0, dp = 0.0;
    if (phi_out) phi_out->assign(cache.fac.size(), 0.0);
    for (std::size_t fi = 0; fi < cache.fac.size(); ++fi) {
        const auto& f = cache.fac[fi];
        const int m = f.m;
        double logw_sum = 0.0, dlogw_sum = 0.0, logw_m = 0.0, dlogw_m = 0.0;
        // s = sum_{l<j} w_l negL_l / negL_j; ds carries c_l = (d negL_l/dbeta)/negL_l per term
        double s = 0.0, ds = 0.0, q_prev = 0.0;
        for (int j = 0; j < m; ++j) {
            const double lt = f.lt[static_cast<std::size_t>(j)];
            const double y = beta * lt;
            double q, c;
            if (y < -37.5) {
                q = y;
                c = lt; // c = lt * x / ((1-x) negL) -> lt as x -> 0
            } else {
                const double negL = -log1mexp(y);
                const double x = std::exp(y);
                q = std::log(negL);
                c = lt * x / ((1.0 - x) * negL);
            }
            const double rescale = (j == 0) ? 0.0 : std::exp(q_prev - q);
            s *= rescale;
            ds *= rescale;
            const double gj = f.gamma[static_cast<std::size_t>(j)];
            const double sw = s + gj;
            const double dlogw = (ds + gj * c) / sw;
            const double logw = q + std::log(sw);
            if (j < m - 1) {
                logw_sum += logw;
                if (dp_out) dlogw_sum += dlogw;
            } else {
                logw_m = logw;
                if (dp_out) dlogw_m = dlogw;
                if (phi_out) (*phi_out)[fi] = std::exp(logw); // gamma_m = w_m, so W_m = Phi_i
            }
            const double wj = f.w[static_cast<std::size_t>(j)];
            s += wj;
            ds += wj * c;
            q_prev = q;
        }
        p += -2.0 * (logw_sum - (m - 1) * logw_m);
        if (dp_out) dp += -2.0 * (dlogw_sum - (m - 1) * dlogw_m);
    }
    if (dp_out) *dp_out = dp;
    return p;
}

} // namespace detail

/// The bracketed log-sum of W_ij with alpha_i factored out, for 1-based position j.
inline double w_partial(const FacilitySample& facility, double beta, int j) {
    const int m = static_cast<int>(facility.times.size());
    if (j < 1 || j > m) throw std::invalid_argument("w_partial: j out of range");
    if (!(beta > 0.0)) throw std::invalid_argument("w_partial: beta must be positive");
    const auto reff = effective_removals(facility.plan, facility.j_count);
    double used = 0.0, acc = 0.0;
    for (int l = 0; l < j - 1; ++l) {
        const double wl = 1.0 + reff[static_cast<std::size_t>(l)];
        acc -= wl * log1mexp(beta * detail::log_ratio(facility.times[static_cast<std::size_t>(l)]));
        used += wl;
    }
    const double gj = static_cast<double>(facility.plan.n) - used;
    acc -= gj * log1mexp(beta * detail::log_ratio(facility.times[static_cast<std::size_t>(j - 1)]));
    return acc;
}

/// Pooled pivot P(beta) across facilities; chi-square with 2*sum(m_i - 1) df at the truth.
inline double pivot_p(double beta, const BapcsSample& sample) {
    if (!(beta > 0.0)) throw std::invalid_argument("pivot_p: beta must be positive");
    const auto cache = detail::build_pivot_cache(sample);
    return detail::pivot_eval(cache, beta, nullptr, nullptr);
}

namespace detail {

constexpr double kPivotBetaLo = 1e-8;
constexpr double kPivotBetaHi = 1e8;

/// Monotone bracket expansion followed by bisection to 1e-10 relative width.
/// P(beta) is strictly increasing in beta for these samples, so the bracket moves
/// right when P is below the target and left otherwise.
inline double solve_pivot_cached(const PivotCache& cache, double target) {
    if (!(target > 0.0)) throw std::invalid_argument("solve_pivot: target must be positive");
    double lo = 1.0, hi = 1.0;
    double p0 = pivot_eval(cache, 1.0, nullptr, nullptr);
    if (p0 < target) {
        while (p0 < target) {
            lo = hi;
            hi *= 4.0;
            if (hi > kPivotBetaHi) {
                hi = kPivotBetaHi;
                p0 = pivot_eval(cache, hi, nullptr, nullptr);
                if (p0 < target) throw std::runtime_error("solve_pivot: target above pivot range");
                break;
            }
            p0 = pivot_eval(cache, hi, nullptr, nullptr);
        }
    } else {
        while (p0 >= target) {
            hi = lo;
            lo /= 4.0;
            if (lo < kPivotBetaLo) {
                lo = kPivotBetaLo;
                p0 = pivot_eval(cache, lo, nullptr, nullptr);
                if (p0 > target) throw std::runtime_error("solve_pivot: target below pivot range");
                break;
            }
            p0 = pivot_eval(cache, lo, nullptr, nullptr);
        }
    }
    while (hi - lo > 1e-10 * std::fmax(lo, 1e-300)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pivot_eval(cache, mid, nullptr, nullptr) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Unique beta with pivot_p(beta) = target; errors if the target lies outside the
/// pivot's range over [1e-8, 1e8].
inline double solve_pivot(double target, const BapcsSample& sample) {
    const auto cache = detail::build_pivot_cache(sample);
    return detail::solve_pivot_cached(cache, target);
}

/// One chi-square variate (thin wrapper so the sampling entry point is named).
inline double chi_square_draw(int df, Rng& rng) {
    if (df < 1) throw std::invalid_argument("chi_square_draw: df must be >= 1");
    return rng.chi_square(df);
}

namespace detail {

/// Newton refinement of the batched pivot solve. Targets arrive sorted ascending, so the
/// previous solution is a valid lower bound for the next root; a bisection fallback keeps
/// every iterate inside the current bracket. Returns the final evaluation point, whose
/// Phi values are therefore exact for the returned beta.
inline double solve_pivot_warm(const PivotCache& cache, double target, double lo, double hi,
                               double guess, std::vector<double>* phi_out) {
    double beta = std::clamp(guess, lo, hi);
    std::vector<double> phi;
    for (int iter = 0; iter < 200; ++iter) {
        double dp = 0.0;
        const double p = pivot_eval(cache, beta, &dp, &phi);
        if (p < target) lo = beta;
        else hi = beta;
        double step = (target - p) / dp;
        if (std::fabs(step) <= 1e-11 * std::fmax(beta, 1e-300) || hi - lo <= 1e-11 * lo) {
            if (phi_out) *phi_out = std::move(phi);
            return beta;
        }
        double next = beta + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        beta = next;
    }
    if (phi_out) *phi_out = std::move(phi);
    return beta;
}

inline double series_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double series_variance(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size());
}

/// Symmetric percentile interval from exact order statistics, floor indices, 1-based,
/// lower index clamped to >= 1, no interpolation.
inline IntervalEstimate gci_from_draws(std::vector<double> draws, double gamma) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    const int lo_idx = std::max(1, static_cast<int>(std::floor(n * gamma / 2.0)));
    const int hi_idx = static_cast<int>(std::floor(n * (1.0 - gamma / 2.0)));
    return IntervalEstimate{draws[static_cast<std::size_t>(lo_idx - 1)],
                            draws[static_cast<std::size_t>(hi_idx - 1)], 1.0 - gamma};
}

inline TargetEstimate summarize_series(const std::string& name, const std::vector<double>& v,
                                       double gamma) {
    const double mean = series_mean(v);
    return TargetEstimate{name, mean, series_variance(v, mean), gci_from_draws(v, gamma)};
}

} // namespace detail

/// Algorithm 1: pivotal point estimation and generalized confidence intervals.
/// Each replicate draws a chi-square target for beta and per-facility chi-squares for the
/// alphas; the weighted alpha uses inverse-variance weights fixed from the full draw set.
inline std::pair<PivotalDraws, PivotalSummary> algorithm1(const BapcsSample& sample, int n_draws,
                                                          double gamma, double t, Rng& rng) {
    if (n_draws < 1000) throw std::invalid_argument("algorithm1: N must be >= 1000");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("algorithm1: gamma in (0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("algorithm1: t must be positive");
    const auto cache = detail::build_pivot_cache(sample);
    const int k = sample.k();

    const double p_min = detail::pivot_eval(cache, detail::kPivotBetaLo, nullptr, nullptr);
    const double p_max = detail::pivot_eval(cache, detail::kPivotBetaHi, nullptr, nullptr);

    // Draw every chi-square first from per-replicate substreams; solve order below does not
    // perturb the stream, so results are reproducible replicate by replicate.
    const std::uint64_t master = rng.next_u64();
    std::vector<double> targets(static_cast<std::size_t>(n_draws));
    std::vector<std::vector<double>> rho(static_cast<std::size_t>(k));
    for (auto& r : rho) r.resize(static_cast<std::size_t>(n_draws));
    for (int s = 0; s < n_draws; ++s) {
        Rng sub = Rng::derive(master, {static_cast<std::uint64_t>(s)});
        double q = chi_square_draw(cache.df_total, sub);
        int tries = 0;
        while (!(q > p_min && q < p_max)) {
            if (++tries > 10)
                throw std::runtime_error("algorithm1: pivot target unsolvable after 10 retries at replicate " +
                                         std::to_string(s));
            q = chi_square_draw(cache.df_total, sub);
        }
        targets[static_cast<std::size_t>(s)] = q;
        for (int i = 0; i < k; ++i)
            rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] =
                chi_square_draw(2 * cache.fac[static_cast<std::size_t>(i)].m, sub);
    }

    // Solve the sorted targets with warm starts; the pivot is monotone so sorted targets
    // give sorted roots and each previous root bounds the next bracket from below.
    std::vector<int> order(static_cast<std::size_t>(n_draws));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return targets[static_cast<std::size_t>(a)] < targets[static_cast<std::size_t>(b)]; });

    PivotalDraws draws;
    draws.n = n_draws;
    draws.beta.resize(static_cast<std::size_t>(n_draws));
    draws.alpha.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n_draws)));
    draws.alpha_weighted.resize(static_cast<std::size_t>(n_draws));
    draws.reliability.resize(static_cast<std::size_t>(n_draws));
    draws.hazard.resize(static_cast<std::size_t>(n_draws));
    draws.mtf.resize(static_cast<std::size_t>(n_draws));

    double lo = detail::kPivotBetaLo, guess = 1.0;
    std::vector<double> phi;
    bool first = true;
    for (int idx : order) {
        const double q = targets[static_cast<std::size_t>(idx)];
        if (first) {
            guess = detail::solve_pivot_cached(cache, q);
            first = false;
        }
        const double beta = detail::solve_pivot_warm(cache, q, lo, detail::kPivotBetaHi, guess, &phi);
        draws.beta[static_cast<std::size_t>(idx)] = beta;
        for (int i = 0; i < k; ++i)
            draws.alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)] =
                rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)] / (2.0 * phi[static_cast<std::size_t>(i)]);
        lo = beta;
        guess = beta;
    }

    // Fixed inverse-variance weights over the full draw set, then the combined alpha and
    // the RC draws.
    std::vector<double> weights(static_cast<std::size_t>(k));
    double wsum = 0.0;
    for (int i = 0; i < k; ++i) {
        const auto& series = draws.alpha[static_cast<std::size_t>(i)];
        const double var = detail::series_variance(series, detail::series_mean(series));
        if (!(var > 0.0)) throw std::runtime_error("algorithm1: degenerate alpha draw variance");
        weights[static_cast<std::size_t>(i)] = 1.0 / var;
        wsum += weights[static_cast<std::size_t>(i)];
    }
    for (int s = 0; s < n_draws; ++s) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i)
            acc += weights[static_cast<std::size_t>(i)] * draws.alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
        const double aw = acc / wsum;
        const double beta = draws.beta[static_cast<std::size_t>(s)];
        const IepParams p(aw, beta);
        draws.alpha_weighted[static_cast<std::size_t>(s)] = aw;
        draws.reliability[static_cast<std::size_t>(s)] = iep_reliability(t, p);
        draws.hazard[static_cast<std::size_t>(s)] = iep_hazard(t, p);
        draws.mtf[static_cast<std::size_t>(s)] = iep_mtf(p);
    }

    PivotalSummary summary;
    summary.n_draws = n_draws;
    summary.targets.push_back(detail::summarize_series("beta", draws.beta, gamma));
    for (int i = 0; i < k; ++i)
        summary.targets.push_back(detail::summarize_series("alpha_" + std::to_string(i + 1),
                                                           draws.alpha[static_cast<std::size_t>(i)], gamma));
    summary.targets.push_back(detail::summarize_series("alpha", draws.alpha_weighted, gamma));
    summary.targets.push_back(detail::summarize_series("reliability", draws.reliability, gamma));
    summary.targets.push_back(detail::summarize_series("hazard", draws.hazard, gamma));
    summary.targets.push_back(detail::summarize_series("mtf", draws.mtf, gamma));
    return {std::move(draws), std::move(summary)};
}

} // namespace bapcs
