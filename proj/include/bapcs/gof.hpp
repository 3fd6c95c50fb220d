#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "censoring.hpp"
#include "competitors.hpp"
#include "distributions.hpp"
#include "mle.hpp"
#include "optimize.hpp"
#include "special.hpp"

namespace bapcs {

/// A complete (uncensored) positive sample with a sorted copy maintained.
struct DataSet {
    std::vector<double> values;
    std::vector<double> sorted;

    explicit DataSet(std::vector<double> v) : values(std::move(v)) {
        if (values.size() < 2) throw std::invalid_argument("DataSet: need at least 2 observations");
        for (double x : values)
            if (!(x > 0.0)) throw std::invalid_argument("DataSet: values must be positive");
        sorted = values;
        std::sort(sorted.begin(), sorted.end());
    }
    int n() const { return static_cast<int>(values.size()); }
};

/// Kolmogorov-Smirnov statistic against a fitted CDF, right-continuous ECDF convention.
inline double ks_statistic(const DataSet& data, const std::function<double(double)>& cdf) {
    const int n = data.n();
    double d = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double f = cdf(data.sorted[static_cast<std::size_t>(i - 1)]);
        d = std::fmax(d, std::fmax(static_cast<double>(i) / n - f, f - static_cast<double>(i - 1) / n));
    }
    return d;
}

/// K-S p-value from the asymptotic Kolmogorov series at sqrt(n)*d. This is the
/// convention that reproduces the reference analysis of the carbon-fibre data.
inline double ks_pvalue(double d, int n) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("ks_pvalue: d must lie in [0,1]");
    if (n < 1) throw std::invalid_argument("ks_pvalue: n must be positive");
    if (d == 0.0) return 1.0;
    if (d == 1.0) return 0.0;
    return kolmogorov_survival(std::sqrt(static_cast<double>(n)) * d);
}

/// Exact finite-sample K-S p-value (Marsaglia-Tsang-Wang matrix power), for n <= 140.
inline double ks_pvalue_exact(double d, int n) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("ks_pvalue_exact: d must lie in [0,1]");
    if (n < 1 || n > 140) throw std::invalid_argument("ks_pvalue_exact: n must lie in [1,140]");
    if (d == 0.0) return 1.0;
    if (d * d * n >= 18.37) return 0.0; // cdf is 1 to double precision
    const int k = static_cast<int>(std::ceil(n * d));
    const double h = k - n * d;
    const int m = 2 * k - 1;
    std::vector<double> big_h(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](std::vector<double>& a, int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * m + j];
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 >= 0) at(big_h, i, j) = 1.0;
    for (int i = 0; i < m; ++i) {
        at(big_h, i, 0) -= std::pow(h, i + 1);
        at(big_h, m - 1, i) -= std::pow(h, m - i);
    }
    at(big_h, m - 1, 0) += (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) at(big_h, i, j) /= g;

    // Q = H^n with power-of-two exponentiation and explicit scaling bookkeeping.
    std::vector<double> q(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) at(q, i, i) = 1.0;
    int e_q = 0, e_h = 0;
    auto matmul = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(static_cast<std::size_t>(m) * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < m; ++l) {
                const double v = a[static_cast<std::size_t>(i) * m + l];
                if (v == 0.0) continue;
                for (int j = 0; j < m; ++j)
                    c[static_cast<std::size_t>(i) * m + j] += v * b[static_cast<std::size_t>(l) * m + j];
            }
        return c;
    };
    auto rescale = [&](std::vector<double>& a, int& e) {
        if (a[static_cast<std::size_t>(k - 1) * m + (k - 1)] > 1e140) {
            for (double& v : a) v *= 1e-140;
            e += 140;
        }
    };
    int power = n;
    while (power > 0) {
        if (power & 1) {
            q = matmul(q, big_h);
            e_q += e_h;
            rescale(q, e_q);
        }
        power >>= 1;
        if (power > 0) {
            big_h = matmul(big_h, big_h);
            e_h += e_h;
            rescale(big_h, e_h);
        }
    }
    double t = q[static_cast<std::size_t>(k - 1) * m + (k - 1)];
    for (int i = 1; i <= n; ++i) {
        t *= static_cast<double>(i) / n;
        if (t < 1e-140) {
            t *= 1e140;
            e_q -= 140;
        }
    }
    const double cdf = t * std::pow(10.0, e_q);
    return std::fmin(1.0, std::fmax(0.0, 1.0 - cdf));
}

/// AIC, BIC, CAIC, HQIC from a log-likelihood, parameter count, and sample size.
struct InfoCriteria {
    double aic;
    double bic;
    double caic;
    double hqic;
};

inline InfoCriteria info_criteria(double loglik, int p, int n) {
    if (p < 1) throw std::invalid_argument("info_criteria: p must be >= 1");
    if (n < 2) throw std::invalid_argument("info_criteria: n must be >= 2");
    const double ln_n = std::log(static_cast<double>(n));
    return InfoCriteria{-2.0 * loglik + 2.0 * p, -2.0 * loglik + p * ln_n,
                        -2.0 * loglik + p * (ln_n + 1.0), -2.0 * loglik + 2.0 * p * std::log(ln_n)};
}

/// One row of the model-comparison table.
struct GofReport {
    std::string model;
    std::string par_names; // e.g. "(alpha, beta)"
    double p1 = 0.0;
    double p2 = 0.0;
    double loglik = 0.0;
    InfoCriteria criteria{0.0, 0.0, 0.0, 0.0};
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    std::function<double(double)> cdf;
    std::function<double(double)> pdf;
    std::function<double(double)> quantile;
};

namespace detail {

/// Treats a complete sample as a single-facility BAPCS block so the profile MLE
/// machinery applies unchanged: no removals, infinite threshold, all failures observed.
inline BapcsSample complete_sample_block(const DataSet& data) {
    const int n = data.n();
    CensoringPlan plan{n, n, std::vector<int>(static_cast<std::size_t>(n), 0)};
    std::vector<FacilitySample> facilities;
    facilities.push_back(FacilitySample{plan, std::numeric_limits<double>::infinity(),
                                        data.sorted, n});
    return BapcsSample(std::move(facilities));
}

/// Best-of-five simplex search in log-parameter space with fixed deterministic starts.
/// stall_tol > 0 enables the flat-ridge stopping rule (used by the IL family).
template <typename NegLL>
inline std::pair<std::vector<double>, double> multistart_simplex(const NegLL& negll,
                                                                 double stall_tol) {
    static const double offsets[5][2] = {{0.0, 0.0}, {1.5, 0.0}, {0.0, 1.5}, {-1.5, 0.0}, {0.0, -1.5}};
    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& off : offsets) {
        SimplexResult res = nelder_mead(negll, {off[0], off[1]}, 0.5, 1e-8, 20000, stall_tol);
        if (!res.converged || !std::isfinite(res.value)) continue;
        any = true;
        if (res.value < best_f) {
            best_f = res.value;
            best_x = res.x;
        }
    }
    if (!any) throw std::runtime_error("fit_model: no simplex start converged");
    return {best_x, best_f};
}

inline double complete_loglik(const DataSet& data, const CompetitorModel& m) {
    return competitor_loglik(data.values, m);
}

} // namespace detail

/// Maximum-likelihood fit of one competitor family on a complete sample.
/// GP is searched over k < 0 with the exponential boundary candidate (k = 0, sigma = mean)
/// included; the better log-likelihood wins. IL sits on an asymptotically flat ridge, so
/// its simplex uses the stall rule, stopping where the likelihood gain goes below 2e-3.
inline std::pair<CompetitorModel, double> fit_competitor(const DataSet& data,
                                                         CompetitorFamily family) {
    auto make = [&](double a, double b) { return CompetitorModel(family, a, b); };
    if (family == CompetitorFamily::GP) {
        auto negll = [&](const std::vector<double>& p) {
            return -detail::complete_loglik(data, make(-std::exp(p[0]), std::exp(p[1])));
        };
        double mean = 0.0;
        for (double x : data.values) mean += x;
        mean /= data.n();
        const CompetitorModel boundary = make(0.0, mean);
        const double ll_boundary = detail::complete_loglik(data, boundary);
        try {
            const auto [x, negf] = detail::multistart_simplex(negll, 0.0);
            const double k_hat = -std::exp(x[0]);
            // within the snap width the density already follows the exponential branch,
            // so such a solution is the boundary model in disguise
            if (std::fabs(k_hat) >= detail::gp_zero_k && -negf > ll_boundary)
                return {make(k_hat, std::exp(x[1])), -negf};
        } catch (const std::runtime_error&) {
            // fall through to the boundary candidate
        }
        return {boundary, ll_boundary};
    }
    auto negll = [&](const std::vector<double>& p) {
        return -detail::complete_loglik(data, make(std::exp(p[0]), std::exp(p[1])));
    };
    const double stall_tol = family == CompetitorFamily::IL ? 2e-3 : 0.0;
    const auto [x, negf] = detail::multistart_simplex(negll, stall_tol);
    return {make(std::exp(x[0]), std::exp(x[1])), -negf};
}

/// Exact profile-method IEP fit on a complete sample.
inline std::pair<IepParams, double> fit_iep(const DataSet& data) {
    const BapcsSample block = detail::complete_sample_block(data);
    const MleFit fit = solve_mle(block);
    return {IepParams(fit.alpha_hats[0], fit.beta_hat), fit.loglik_at_max};
}

/// Model ids accepted by fit_model, in the comparison-table order.
inline const std::vector<std::string>& gof_model_ids() {
    static const std::vector<std::string> ids = {"IEP", "GP", "EP", "IER", "IL"};
    return ids;
}

/// Fits one family and assembles its full table row (criteria, K-S, p-value).
inline GofReport fit_model(const DataSet& data, const std::string& model_id) {
    GofReport rep;
    rep.model = model_id;
    if (model_id == "IEP") {
        const auto [params, ll] = fit_iep(data);
        rep.par_names = "(alpha, beta)";
        rep.p1 = params.alpha;
        rep.p2 = params.beta;
        rep.loglik = ll;
        rep.cdf = [params](double x) { return iep_cdf(x, params); };
        rep.pdf = [params](double x) { return iep_pdf(x, params); };
        rep.quantile = [params](double u) { return iep_quantile(u, params); };
    } else {
        CompetitorFamily family;
        if (model_id == "GP") {
            family = CompetitorFamily::GP;
            rep.par_names = "(k, sigma)";
        } else if (model_id == "EP") {
            family = CompetitorFamily::EP;
            rep.par_names = "(lambda, theta)";
        } else if (model_id == "IER") {
            family = CompetitorFamily::IER;
            rep.par_names = "(alpha, theta)";
        } else if (model_id == "IL") {
            family = CompetitorFamily::IL;
            rep.par_names = "(alpha, theta)";
        } else {
            throw std::invalid_argument("fit_model: unknown model id " + model_id);
        }
        const auto [model, ll] = fit_competitor(data, family);
        rep.p1 = model.p1;
        rep.p2 = model.p2;
        rep.loglik = ll;
        rep.cdf = [model](double x) { return competitor_cdf(x, model); };
        rep.pdf = [model](double x) { return competitor_pdf(x, model); };
        rep.quantile = [model](double u) { return competitor_quantile(u, model); };
    }
    rep.criteria = info_criteria(rep.loglik, 2, data.n());
    rep.ks_stat = ks_statistic(data, rep.cdf);
    rep.ks_pvalue = ks_pvalue(rep.ks_stat, data.n());
    return rep;
}

/// All five table rows in the comparison order.
inline std::vector<GofReport> fit_all_models(const DataSet& data) {
    std::vector<GofReport> out;
    for (const std::string& id : gof_model_ids()) out.push_back(fit_model(data, id));
    return out;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& line : lines) out << line << "\n";
}

} // namespace detail

/// Writes the model comparison table as CSV, one row per fitted family.
inline std::string write_gof_table(const std::vector<GofReport>& reports, const std::string& path) {
    std::vector<std::string> lines;
    lines.push_back("model,par_names,mle_1,mle_2,loglik,aic,bic,caic,hqic,ks_stat,ks_pvalue");
    for (const auto& r : reports) {
        lines.push_back(r.model + ",\"" + r.par_names + "\"," + detail::fmt17(r.p1) + "," +
                        detail::fmt17(r.p2) + "," + detail::fmt17(r.loglik) + "," +
                        detail::fmt17(r.criteria.aic) + "," + detail::fmt17(r.criteria.bic) + "," +
                        detail::fmt17(r.criteria.caic) + "," + detail::fmt17(r.criteria.hqic) + "," +
                        detail::fmt17(r.ks_stat) + "," + detail::fmt17(r.ks_pvalue));
    }
    detail::write_lines(path, lines);
    return path;
}

/// Emits the plot series as CSV files into out_dir: ecdf.csv, hist.csv, ttt.csv, and
/// per-model pp_<model>.csv / qq_<model>.csv. Returns the written paths.
inline std::vector<std::string> plot_data(const DataSet& data, const std::vector<GofReport>& fits,
                                          const std::string& out_dir) {
    const int n = data.n();
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::vector<std::string>& lines) {
        const std::string path = out_dir + "/" + name;
        detail::write_lines(path, lines);
        written.push_back(path);
    };

    // ECDF step values at the order statistics, plus each fitted CDF.
    {
        std::vector<std::string> lines;
        std::string header = "x,ecdf";
        for (const auto& f : fits) header += ",F_" + f.model;
        lines.push_back(header);
        for (int i = 1; i <= n; ++i) {
            const double x = data.sorted[static_cast<std::size_t>(i - 1)];
            std::string row = detail::fmt17(x) + "," + detail::fmt17(static_cast<double>(i) / n);
            for (const auto& f : fits) row += "," + detail::fmt17(f.cdf(x));
            lines.push_back(row);
        }
        emit("ecdf.csv", lines);
    }

    // Histogram step outline with ceil(1 + log2 n) bins, then 200-point density curves.
    {
        const int bins = static_cast<int>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
        const double lo = data.sorted.front(), hi = data.sorted.back();
        const double width = (hi - lo) / bins;
        std::vector<int> counts(static_cast<std::size_t>(bins), 0);
        for (double x : data.values) {
            int b = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
            b = std::min(std::max(b, 0), bins - 1);
            ++counts[static_cast<std::size_t>(b)];
        }
        std::vector<std::string> lines;
        lines.push_back("series,x,y");
        for (int b = 0; b < bins; ++b) {
            const double density = counts[static_cast<std::size_t>(b)] / (n * width);
            lines.push_back("hist," + detail::fmt17(lo + b * width) + "," + detail::fmt17(density));
            lines.push_back("hist," + detail::fmt17(lo + (b + 1) * width) + "," + detail::fmt17(density));
        }
        for (const auto& f : fits) {
            for (int g = 0; g < 200; ++g) {
                const double x = lo + (hi - lo) * (g + 0.5) / 200.0;
                lines.push_back(f.model + "," + detail::fmt17(x) + "," + detail::fmt17(f.pdf(x)));
            }
        }
        emit("hist.csv", lines);
    }

    // P-P and Q-Q pairs per model with plotting positions i/(n+1).
    for (const auto& f : fits) {
        std::vector<std::string> pp, qq;
        pp.push_back("i,empirical,fitted");
        qq.push_back("i,x,model_quantile");
        for (int i = 1; i <= n; ++i) {
            const double u = static_cast<double>(i) / (n + 1);
            const double x = data.sorted[static_cast<std::size_t>(i - 1)];
            pp.push_back(std::to_string(i) + "," + detail::fmt17(u) + "," + detail::fmt17(f.cdf(x)));
            qq.push_back(std::to_string(i) + "," + detail::fmt17(x) + "," + detail::fmt17(f.quantile(u)));
        }
        std::string tag = f.model;
        std::transform(tag.begin(), tag.end(), tag.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        emit("pp_" + tag + ".csv", pp);
        emit("qq_" + tag + ".csv", qq);
    }

    // Scaled TTT transform points.
    {
        std::vector<std::string> lines;
        lines.push_back("u,ttt");
        double total = 0.0;
        for (double x : data.sorted) total += x;
        double prefix = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double x = data.sorted[static_cast<std::size_t>(i - 1)];
            prefix += x;
            const double ttt = (prefix + (n - i) * x) / total;
            lines.push_back(detail::fmt17(static_cast<double>(i) / n) + "," + detail::fmt17(ttt));
        }
        emit("ttt.csv", lines);
    }
    return written;
}

} // namespace bapcs
