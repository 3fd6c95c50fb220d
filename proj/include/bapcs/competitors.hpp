#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bapcs {

/// Families compared against the IEP model on real data.
enum class CompetitorFamily { GP, EP, IER, IL };

/// Tagged two-parameter competitor model.
/// GP(k, sigma): generalized Pareto; EP(lambda, theta): exponentiated Pareto;
/// IER(alpha, theta): inverted exponentiated Rayleigh; IL(alpha, theta): inverse Lomax.
struct CompetitorModel {
    CompetitorFamily family;
    double p1; // k, lambda, alpha, alpha
    double p2; // sigma, theta, theta, theta

    CompetitorModel(CompetitorFamily f, double a, double b) : family(f), p1(a), p2(b) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("CompetitorModel: parameters must be finite");
        const bool first_positive = f != CompetitorFamily::GP; // GP's k may be any sign
        if ((first_positive && !(a > 0.0)) || !(b > 0.0))
            throw std::invalid_argument("CompetitorModel: parameters out of range");
    }
};

namespace detail {
constexpr double gp_zero_k = 1e-12; // |k| below this uses the exponential branch
}

/// Density; returns 0 outside the model support. Throws for x < 0 (outside the lifetime domain).
inline double competitor_pdf(double x, const CompetitorModel& m) {
    if (!(x >= 0.0)) throw std::invalid_argument("competitor_pdf: x must be nonnegative");
    if (x == 0.0) return 0.0;
    switch (m.family) {
        case CompetitorFamily::GP: {
            const double k = m.p1, s = m.p2;
            if (std::fabs(k) < detail::gp_zero_k) return std::exp(-x / s) / s;
            const double q = k * x / s;
            if (q >= 1.0) return 0.0;
            return std::exp((1.0 / k - 1.0) * std::log1p(-q)) / s;
        }
        case CompetitorFamily::EP: {
            const double l = m.p1, th = m.p2;
            const double lz = std::log(-std::expm1(-l * std::log1p(x)));
            return std::exp(std::log(l * th) + (th - 1.0) * lz - (l + 1.0) * std::log1p(x));
        }
        case CompetitorFamily::IER: {
            const double a = m.p1, b = m.p2;
            const double e = -b / (x * x);
            return std::exp(std::log(2.0 * a * b) - 3.0 * std::log(x) + e + (a - 1.0) * std::log(-std::expm1(e)));
        }
        case CompetitorFamily::IL: {
            const double a = m.p1, th = m.p2;
            return std::exp(std::log(a / th) - 2.0 * std::log(x) - (a + 1.0) * std::log1p(1.0 / (th * x)));
        }
    }
    return 0.0;
}

/// CDF on x >= 0.
inline double competitor_cdf(double x, const CompetitorModel& m) {
    if (!(x >= 0.0)) throw std::invalid_argument("competitor_cdf: x must be nonnegative");
    if (x == 0.0) return 0.0;
    switch (m.family) {
        case CompetitorFamily::GP: {
            const double k = m.p1, s = m.p2;
            if (std::fabs(k) < detail::gp_zero_k) return -std::expm1(-x / s);
            const double q = k * x / s;
            if (q >= 1.0) return 1.0;
            return -std::expm1(std::log1p(-q) / k);
        }
        case CompetitorFamily::EP:
            return std::exp(m.p2 * std::log(-std::expm1(-m.p1 * std::log1p(x))));
        case CompetitorFamily::IER:
            return -std::expm1(m.p1 * std::log(-std::expm1(-m.p2 / (x * x))));
        case CompetitorFamily::IL:
            return std::exp(-m.p1 * std::log1p(1.0 / (m.p2 * x)));
    }
    return 0.0;
}

/// Quantile on u in (0,1).
inline double competitor_quantile(double u, const CompetitorModel& m) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("competitor_quantile: u must lie in (0,1)");
    switch (m.family) {
        case CompetitorFamily::GP: {
            const double k = m.p1, s = m.p2;
            if (std::fabs(k) < detail::gp_zero_k) return -s * std::log1p(-u);
            return s * -std::expm1(k * std::log1p(-u)) / k;
        }
        case CompetitorFamily::EP:
            return std::expm1(-std::log1p(-std::exp(std::log(u) / m.p2)) / m.p1);
        case CompetitorFamily::IER: {
            const double inner = std::log1p(-std::exp(std::log1p(-u) / m.p1));
            return std::sqrt(-m.p2 / inner);
        }
        case CompetitorFamily::IL:
            return 1.0 / (m.p2 * std::expm1(-std::log(u) / m.p1));
    }
    return 0.0;
}

/// Sum of log densities; -inf when any observation falls outside the support.
inline double competitor_loglik(const std::vector<double>& data, const CompetitorModel& m) {
    double ll = 0.0;
    for (double x : data) {
        const double f = competitor_pdf(x, m);
        if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += std::log(f);
    }
    return ll;
}

inline std::string competitor_name(CompetitorFamily f) {
    switch (f) {
        case CompetitorFamily::GP: return "GP";
        case CompetitorFamily::EP: return "EP";
        case CompetitorFamily::IER: return "IER";
        case CompetitorFamily::IL: return "IL";
    }
    return "?";
}

} // namespace bapcs
