#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "special.hpp"

namespace bapcs {

/// Shape parameters of the inverted exponentiated Pareto (IEP) distribution.
struct IepParams {
    double alpha;
    double beta;

    IepParams(double a, double b) : alpha(a), beta(b) {
        if (!(std::isfinite(a) && a > 0.0) || !(std::isfinite(b) && b > 0.0))
            throw std::invalid_argument("IepParams: alpha and beta must be finite and positive");
    }
};

namespace detail {

/// log of s = t/(1+t), computed as log t - log1p t for stability across the whole range.
inline double log_ratio(double t) {
    return std::log(t) - std::log1p(t);
}

/// log(1 - (t/(1+t))^beta), stable for s^beta near 0 and near 1.
inline double log1m_pow(double t, double beta) {
    return log1mexp(beta * log_ratio(t));
}

} // namespace detail

/// IEP CDF: F(t) = 1 - (1 - (t/(1+t))^beta)^alpha.
inline double iep_cdf(double t, const IepParams& p) {
    if (!std::isfinite(t)) {
        if (std::isnan(t)) throw std::invalid_argument("iep_cdf: t must not be NaN");
        return t > 0.0 ? 1.0 : 0.0;
    }
    if (t < 0.0) throw std::invalid_argument("iep_cdf: t must be nonnegative");
    if (t == 0.0) return 0.0;
    return -std::expm1(p.alpha * detail::log1m_pow(t, p.beta));
}

/// IEP reliability (survival): R(t) = (1 - (t/(1+t))^beta)^alpha.
inline double iep_reliability(double t, const IepParams& p) {
    if (!(t > 0.0)) throw std::invalid_argument("iep_reliability: t must be positive");
    return std::exp(p.alpha * detail::log1m_pow(t, p.beta));
}

/// IEP log-density.
inline double iep_logpdf(double t, const IepParams& p) {
    if (!(t > 0.0)) throw std::invalid_argument("iep_logpdf: t must be positive");
    return std::log(p.alpha) + std::log(p.beta) + (p.beta - 1.0) * std::log(t) -
           (p.beta + 1.0) * std::log1p(t) + (p.alpha - 1.0) * detail::log1m_pow(t, p.beta);
}

/// IEP PDF: f(t) = alpha beta t^{beta-1} (1+t)^{-(beta+1)} [1 - (t/(1+t))^beta]^{alpha-1}.
inline double iep_pdf(double t, const IepParams& p) {
    return std::exp(iep_logpdf(t, p));
}

/// IEP hazard rate H(t) = f(t)/R(t).
inline double iep_hazard(double t, const IepParams& p) {
    return std::exp(iep_logpdf(t, p) - p.alpha * detail::log1m_pow(t, p.beta));
}

/// IEP quantile: closed-form inversion of the CDF.
inline double iep_quantile(double u, const IepParams& p) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("iep_quantile: u must lie in (0,1)");
    // s^beta = 1 - (1-u)^(1/alpha), then t = s/(1-s)
    const double log_sb = log1mexp(std::log1p(-u) / p.alpha);
    const double s = std::exp(log_sb / p.beta);
    return s / (1.0 - s);
}

/// Median time to failure: mtf = {(1 - 2^{-1/alpha})^{-1/beta} - 1}^{-1}, the 50% quantile.
inline double iep_mtf(const IepParams& p) {
    return iep_quantile(0.5, p);
}

/// CDF of the r-th order statistic of an IEP sample of size n (binomial tail sum).
inline double order_stat_cdf(int r, int n, double t, const IepParams& p) {
    if (r < 1 || r > n) throw std::invalid_argument("order_stat_cdf: require 1 <= r <= n");
    if (!(t > 0.0)) return 0.0;
    const double logF = std::log(iep_cdf(t, p));
    const double logS = p.alpha * detail::log1m_pow(t, p.beta);
    double sum = 0.0;
    for (int i = r; i <= n; ++i) {
        const double logc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        sum += std::exp(logc + i * logF + (n - i) * logS);
    }
    return sum > 1.0 ? 1.0 : sum;
}

/// PDF of the r-th order statistic of an IEP sample of size n (beta kernel).
inline double order_stat_pdf(int r, int n, double t, const IepParams& p) {
    if (r < 1 || r > n) throw std::invalid_argument("order_stat_pdf: require 1 <= r <= n");
    const double logF = std::log(iep_cdf(t, p));
    const double logS = p.alpha * detail::log1m_pow(t, p.beta);
    const double logc = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(r)) - std::lgamma(n - r + 1.0);
    return std::exp(logc + (r - 1.0) * logF + (n - r) * logS + iep_logpdf(t, p));
}

} // namespace bapcs
