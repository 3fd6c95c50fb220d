#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "censoring.hpp"
#include "distributions.hpp"
#include "roots.hpp"
#include "special.hpp"

namespace bapcs {

/// Maximum-likelihood fit of a BAPCS sample. alpha_weighted is the inverse-variance
/// combination finalized once observed-information variances are available; it is NaN
/// straight out of solve_mle.
struct MleFit {
    double beta_hat = 0.0;
    std::vector<double> alpha_hats;
    double alpha_weighted = std::numeric_limits<double>::quiet_NaN();
    double loglik_at_max = 0.0;
    double score_residual = 0.0;
};

/// Reliability characteristics evaluated at the fitted parameters.
struct RcEstimates {
    double r_hat;
    double h_hat;
    double mtf_hat;
    double t;
};

namespace detail {

/// Per-facility quantities reused across profile-score evaluations:
/// lt[j] = log(T_j / (1 + T_j)) and w[j] = 1 + r_j (effective removals).
struct FacilityTerms {
    int m = 0;
    std::vector<double> lt;
    std::vector<double> w;
    double sum_log_t = 0.0;   // sum of log T_j
    double sum_log1p_t = 0.0; // sum of log(1 + T_j)
};

inline FacilityTerms make_terms(const FacilitySample& f) {
    FacilityTerms ft;
    ft.m = f.plan.m;
    ft.lt.resize(f.times.size());
    const std::vector<int> r = f.removals_executed();
    ft.w.resize(r.size());
    for (std::size_t j = 0; j < f.times.size(); ++j) {
        ft.lt[j] = log_ratio(f.times[j]);
        ft.w[j] = 1.0 + r[j];
        ft.sum_log_t += std::log(f.times[j]);
        ft.sum_log1p_t += std::log1p(f.times[j]);
    }
    return ft;
}

inline std::vector<FacilityTerms> make_terms(const BapcsSample& sample) {
    std::vector<FacilityTerms> out;
    out.reserve(sample.facilities.size());
    for (const auto& f : sample.facilities) out.push_back(make_terms(f));
    return out;
}

/// D_i(beta) = sum_j (1 + r_j) log(1 - t_j^beta); strictly negative.
inline double d_sum(const FacilityTerms& ft, double beta) {
    double d = 0.0;
    for (std::size_t j = 0; j < ft.lt.size(); ++j) d += ft.w[j] * log1mexp(beta * ft.lt[j]);
    return d;
}

/// Profile score contribution pieces for one facility at the given beta.
struct ScorePieces {
    double sum_lt = 0.0;  // sum_j log t_j
    double sum_u = 0.0;   // sum_j t_j^beta log t_j / (1 - t_j^beta)
    double num = 0.0;     // sum_j (1 + r_j) t_j^beta log t_j / (1 - t_j^beta)
    double den = 0.0;     // D_i(beta)
};

inline ScorePieces score_pieces(const FacilityTerms& ft, double beta) {
    ScorePieces sp;
    for (std::size_t j = 0; j < ft.lt.size(); ++j) {
        const double lt = ft.lt[j];
        const double x = std::exp(beta * lt);
        const double u = x * lt / (1.0 - x);
        sp.sum_lt += lt;
        sp.sum_u += u;
        sp.num += ft.w[j] * u;
        sp.den += ft.w[j] * log1mexp(beta * lt);
    }
    return sp;
}

inline double profile_score_terms(double beta, const std::vector<FacilityTerms>& terms) {
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const ScorePieces sp = score_pieces(terms[i], beta);
        const double mi = static_cast<double>(terms[i].m);
        const double contrib = mi / beta + sp.sum_lt + sp.sum_u + mi * sp.num / sp.den;
        if (!std::isfinite(contrib))
            throw std::runtime_error("profile_score: non-finite contribution from facility " +
                                     std::to_string(i));
        s += contrib;
    }
    return s;
}

} // namespace detail

/// Log-likelihood of the BAPCS sample at (alphas, beta), additive constants omitted.
inline double log_likelihood(const BapcsSample& sample, const std::vector<double>& alphas, double beta) {
    if (static_cast<int>(alphas.size()) != sample.k())
        throw std::invalid_argument("log_likelihood: need one alpha per facility");
    if (!(beta > 0.0)) throw std::invalid_argument("log_likelihood: beta must be positive");
    double ll = 0.0;
    for (std::size_t i = 0; i < sample.facilities.size(); ++i) {
        const double a = alphas[i];
        if (!(a > 0.0)) throw std::invalid_argument("log_likelihood: alphas must be positive");
        const auto ft = detail::make_terms(sample.facilities[i]);
        ll += ft.m * std::log(a) + ft.m * std::log(beta) + (beta - 1.0) * ft.sum_log_t -
              (beta + 1.0) * ft.sum_log1p_t;
        for (std::size_t j = 0; j < ft.lt.size(); ++j)
            ll += (a * ft.w[j] - 1.0) * log1mexp(beta * ft.lt[j]);
    }
    return ll;
}

/// Closed-form per-facility alpha MLE at fixed beta: alpha_i(beta) = -m_i / D_i(beta).
inline double alpha_closed_form(const FacilitySample& facility, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("alpha_closed_form: beta must be positive");
    const double d = detail::d_sum(detail::make_terms(facility), beta);
    if (!(d < 0.0)) throw std::runtime_error("alpha_closed_form: degenerate sample (D >= 0)");
    return -static_cast<double>(facility.plan.m) / d;
}

/// Profile score in beta with every alpha_i profiled out.
inline double profile_score(double beta, const BapcsSample& sample) {
    if (!(beta > 0.0)) throw std::invalid_argument("profile_score: beta must be positive");
    return detail::profile_score_terms(beta, detail::make_terms(sample));
}

/// Exact-profile MLE: root of the profile score, then closed-form alphas.
/// alpha_weighted is left NaN here; the asymptotic layer fills it from
/// observed-information weights.
inline MleFit solve_mle(const BapcsSample& sample, double initial_beta = 1.0) {
    const auto terms = detail::make_terms(sample);
    bool any_ge2 = false;
    for (const auto& t : terms) any_ge2 = any_ge2 || t.m >= 2;
    if (!any_ge2) throw std::invalid_argument("solve_mle: need at least one facility with m >= 2");

    auto score = [&](double b) { return detail::profile_score_terms(b, terms); };
    RootOptions opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 1e-15;
    MleFit fit;
    fit.beta_hat = solve_monotone(score, initial_beta, 1e-6, 1e6, opt);
    fit.score_residual = score(fit.beta_hat);

    fit.alpha_hats.reserve(terms.size());
    for (const auto& ft : terms) {
        const double d = detail::d_sum(ft, fit.beta_hat);
        if (!(d < 0.0)) throw std::runtime_error("solve_mle: degenerate facility likelihood");
        fit.alpha_hats.push_back(-static_cast<double>(ft.m) / d);
    }
    fit.loglik_at_max = log_likelihood(sample, fit.alpha_hats, fit.beta_hat);
    return fit;
}

/// Inverse-variance weighted combination of the facility alpha estimates.
inline double weighted_alpha(const std::vector<double>& alpha_hats, const std::vector<double>& variances) {
    if (alpha_hats.size() != variances.size() || alpha_hats.empty())
        throw std::invalid_argument("weighted_alpha: mismatched or empty inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < alpha_hats.size(); ++i) {
        if (!(variances[i] > 0.0)) throw std::invalid_argument("weighted_alpha: variances must be positive");
        const double w = 1.0 / variances[i];
        num += w * alpha_hats[i];
        den += w;
    }
    return num / den;
}

/// Plug-in reliability characteristics at (alpha_weighted, beta_hat).
inline RcEstimates rc_estimates(const MleFit& fit, double t) {
    if (!std::isfinite(fit.alpha_weighted))
        throw std::invalid_argument("rc_estimates: alpha_weighted not finalized");
    const IepParams p(fit.alpha_weighted, fit.beta_hat);
    return RcEstimates{iep_reliability(t, p), iep_hazard(t, p), iep_mtf(p), t};
}

} // namespace bapcs
