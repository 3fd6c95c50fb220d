#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mle.hpp"
#include "special.hpp"

namespace bapcs {

/// Dense row-major square matrix, just big enough for (k+1)-dimensional information matrices.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Thrown when an information matrix is not usable as a positive-definite covariance source.
struct NonPdError : std::runtime_error {
    explicit NonPdError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inverse by Gauss-Jordan elimination with partial pivoting, with an identity-residual
/// check and a positive-diagonal check on the result.
inline Matrix invert_spd(const Matrix& m) {
    const int n = m.n;
    Matrix work = m, inv(n);
    for (int i = 0; i < n; ++i) inv(i, i) = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(work(r, col)) > std::fabs(work(piv, col))) piv = r;
        if (work(piv, col) == 0.0) throw NonPdError("invert_spd: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(work(piv, j), work(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const double d = work(col, col);
        for (int j = 0; j < n; ++j) {
            work(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    // residual ||M * inv - I||_inf
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += m(i, l) * inv(l, j);
            resid = std::fmax(resid, std::fabs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    if (!(resid < 1e-8)) throw NonPdError("invert_spd: inversion residual too large");
    for (int i = 0; i < n; ++i)
        if (!(inv(i, i) > 0.0)) throw NonPdError("invert_spd: non-positive variance on diagonal");
    return inv;
}

/// Observed Fisher information and its inverse, parameter order (beta, alpha_1..alpha_k).
struct ObservedInfo {
    Matrix matrix;
    Matrix inverse;
};

namespace detail {

/// Analytic gradient of the log-likelihood in the order (beta, alpha_1..alpha_k).
inline std::vector<double> loglik_gradient(const std::vector<FacilityTerms>& terms,
                                           const std::vector<double>& alphas, double beta) {
    const std::size_t k = terms.size();
    std::vector<double> g(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const FacilityTerms& ft = terms[i];
        double dsum = 0.0, dbeta = ft.m / beta;
        for (std::size_t j = 0; j < ft.lt.size(); ++j) {
            const double lt = ft.lt[j];
            const double x = std::exp(beta * lt);
            const double u = x * lt / (1.0 - x);
            dsum += ft.w[j] * log1mexp(beta * lt);
            dbeta += lt - (alphas[i] * ft.w[j] - 1.0) * u;
        }
        g[0] += dbeta;
        g[i + 1] = ft.m / alphas[i] + dsum;
    }
    return g;
}

} // namespace detail

/// Negative Hessian of the log-likelihood at the fit. The alpha block is analytic
/// (diagonal m_i/alpha_i^2, zero cross terms); the beta row/column come from central
/// finite differences of the analytic gradient with step 1e-5 * max(1, |theta|).
inline ObservedInfo observed_information(const BapcsSample& sample, const MleFit& fit) {
    const auto terms = detail::make_terms(sample);
    const int k = sample.k();
    ObservedInfo info;
    info.matrix = Matrix(k + 1);

    for (int i = 0; i < k; ++i) {
        const double a = fit.alpha_hats[i];
        info.matrix(i + 1, i + 1) = terms[i].m / (a * a);
    }

    const double h = 1e-5 * std::fmax(1.0, std::fabs(fit.beta_hat));
    const auto gp = detail::loglik_gradient(terms, fit.alpha_hats, fit.beta_hat + h);
    const auto gm = detail::loglik_gradient(terms, fit.alpha_hats, fit.beta_hat - h);
    for (int j = 0; j <= k; ++j) {
        const double d2 = (gp[j] - gm[j]) / (2.0 * h); // d/dbeta of gradient component j
        if (!std::isfinite(d2)) throw std::runtime_error("observed_information: non-finite entry");
        info.matrix(0, j) = -d2;
        info.matrix(j, 0) = -d2;
    }

    info.inverse = invert_spd(info.matrix);
    return info;
}

/// Standard normal quantile z_{gamma/2} for two-sided intervals.
inline double z_quantile(double p) { return normal_quantile(p); }

/// Two-sided normal-approximation interval.
struct IntervalEstimate {
    double lower;
    double upper;
    double level;
    double length() const { return upper - lower; }
};

inline IntervalEstimate aci_parameter(double estimate, double variance, double gamma) {
    if (!(variance >= 0.0)) throw std::invalid_argument("aci_parameter: variance must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("aci_parameter: gamma must lie in (0,1)");
    const double z = normal_quantile(1.0 - 0.5 * gamma);
    const double half = z * std::sqrt(variance);
    return IntervalEstimate{estimate - half, estimate + half, 1.0 - gamma};
}

/// Reliability-characteristic gradients with respect to (alpha, beta) at evaluation time t.
namespace detail {

struct RcGradient {
    double value;
    double d_alpha;
    double d_beta;
};

inline RcGradient reliability_gradient(double t, double alpha, double beta) {
    const double lt = log_ratio(t);
    const double x = std::exp(beta * lt);
    const double L = log1mexp(beta * lt);
    const double r = std::exp(alpha * L);
    const double u = x * lt / (1.0 - x);
    return RcGradient{r, L * r, -alpha * r * u};
}

inline RcGradient hazard_gradient(double t, double alpha, double beta) {
    const double lt = log_ratio(t);
    const double x = std::exp(beta * lt);
    const double u = x * lt / (1.0 - x);
    const IepParams p(alpha, beta);
    const double h = iep_hazard(t, p);
    return RcGradient{h, h / alpha, h * (1.0 / beta + lt + u)};
}

inline RcGradient mtf_gradient(double alpha, double beta) {
    const double two_pow = std::exp2(-1.0 / alpha); // 2^(-1/alpha)
    const double a = 1.0 - two_pow;
    const double w = std::exp(-std::log(a) / beta); // a^(-1/beta)
    const double mu = 1.0 / (w - 1.0);
    const double ln2 = 0.6931471805599453;
    const double d_alpha = -mu * mu * w * two_pow * ln2 / (a * beta * alpha * alpha);
    const double d_beta = -mu * mu * w * std::log(a) / (beta * beta);
    return RcGradient{mu, d_alpha, d_beta};
}

} // namespace detail

/// Delta-method variance targets.
enum class DeltaTarget { AlphaWeighted, Reliability, Hazard, Mtf };

/// Delta-method variance of a target that factors through (beta, alpha_weighted),
/// with the inverse-variance weights held fixed during differentiation.
inline double delta_method_variance(const MleFit& fit, const Matrix& vcov, DeltaTarget target,
                                    double t = 0.0) {
    const int k = static_cast<int>(fit.alpha_hats.size());
    std::vector<double> weights(k);
    double wsum = 0.0;
    for (int i = 0; i < k; ++i) {
        weights[i] = 1.0 / vcov(i + 1, i + 1);
        wsum += weights[i];
    }

    std::vector<double> grad(k + 1, 0.0);
    if (target == DeltaTarget::AlphaWeighted) {
        for (int i = 0; i < k; ++i) grad[i + 1] = weights[i] / wsum;
    } else {
        detail::RcGradient g{0.0, 0.0, 0.0};
        const double aw = fit.alpha_weighted;
        switch (target) {
            case DeltaTarget::Reliability: g = detail::reliability_gradient(t, aw, fit.beta_hat); break;
            case DeltaTarget::Hazard: g = detail::hazard_gradient(t, aw, fit.beta_hat); break;
            case DeltaTarget::Mtf: g = detail::mtf_gradient(aw, fit.beta_hat); break;
            default: break;
        }
        grad[0] = g.d_beta;
        for (int i = 0; i < k; ++i) grad[i + 1] = g.d_alpha * weights[i] / wsum;
    }

    double v = 0.0;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) v += grad[i] * vcov(i, j) * grad[j];
    if (!std::isfinite(v)) throw std::runtime_error("delta_method_variance: non-finite result");
    return v;
}

/// One reported estimate: point value, variance, and its confidence interval.
struct TargetEstimate {
    std::string name;
    double estimate;
    double variance;
    IntervalEstimate interval;
};

/// Full MLE-side estimation output for one sample.
struct EstimationResult {
    MleFit fit;
    RcEstimates rc{0.0, 0.0, 0.0, 0.0};
    ObservedInfo info;
    std::vector<TargetEstimate> targets; // beta, alpha_1..alpha_k, alpha, R(t), H(t), MTF
};

/// End-to-end MLE pipeline: profile MLE, observed information, weighted alpha,
/// delta-method variances, and ACIs for every reported target.
inline EstimationResult estimate_block(const BapcsSample& sample, double gamma, double t) {
    EstimationResult res;
    res.fit = solve_mle(sample);
    res.info = observed_information(sample, res.fit);

    const int k = sample.k();
    std::vector<double> variances(k);
    for (int i = 0; i < k; ++i) variances[i] = res.info.inverse(i + 1, i + 1);
    res.fit.alpha_weighted = weighted_alpha(res.fit.alpha_hats, variances);
    res.rc = rc_estimates(res.fit, t);

    auto add = [&](const std::string& name, double est, double var) {
        res.targets.push_back(TargetEstimate{name, est, var, aci_parameter(est, var, gamma)});
    };
    add("beta", res.fit.beta_hat, res.info.inverse(0, 0));
    for (int i = 0; i < k; ++i)
        add("alpha_" + std::to_string(i + 1), res.fit.alpha_hats[i], variances[i]);
    add("alpha", res.fit.alpha_weighted,
        delta_method_variance(res.fit, res.info.inverse, DeltaTarget::AlphaWeighted));
    add("reliability", res.rc.r_hat,
        delta_method_variance(res.fit, res.info.inverse, DeltaTarget::Reliability, t));
    add("hazard", res.rc.h_hat,
        delta_method_variance(res.fit, res.info.inverse, DeltaTarget::Hazard, t));
    add("mtf", res.rc.mtf_hat, delta_method_variance(res.fit, res.info.inverse, DeltaTarget::Mtf));
    return res;
}

} // namespace bapcs
