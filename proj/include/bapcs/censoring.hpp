#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "distributions.hpp"
#include "rng.hpp"

namespace bapcs {

/// Progressive Type-II censoring plan for one facility: n units, m observed failures,
/// planned removals R_1..R_m summing to n - m.
struct CensoringPlan {
    int n;
    int m;
    std::vector<int> removals;

    CensoringPlan(int n_, int m_, std::vector<int> removals_)
        : n(n_), m(m_), removals(std::move(removals_)) {
        if (m < 1 || m > n) throw std::invalid_argument("CensoringPlan: require 1 <= m <= n");
        if (static_cast<int>(removals.size()) != m)
            throw std::invalid_argument("CensoringPlan: removals must have length m");
        int total = 0;
        for (int r : removals) {
            if (r < 0) throw std::invalid_argument("CensoringPlan: removals must be nonnegative");
            total += r;
        }
        if (total != n - m) throw std::invalid_argument("CensoringPlan: removals must sum to n - m");
    }
};

/// One facility of a block design: a plan plus its threshold time.
struct FacilityDesign {
    CensoringPlan plan;
    double threshold;

    FacilityDesign(CensoringPlan p, double t) : plan(std::move(p)), threshold(t) {
        if (std::isnan(t) || t <= 0.0)
            throw std::invalid_argument("FacilityDesign: threshold must be positive (may be +inf)");
    }
};

/// Block design: k facilities, each with its own plan and threshold.
struct BlockDesign {
    std::vector<FacilityDesign> facilities;

    explicit BlockDesign(std::vector<FacilityDesign> f) : facilities(std::move(f)) {
        if (facilities.empty()) throw std::invalid_argument("BlockDesign: need at least one facility");
    }
    int k() const { return static_cast<int>(facilities.size()); }
    int total_units() const {
        int s = 0;
        for (const auto& f : facilities) s += f.plan.n;
        return s;
    }
};

/// The three pre-set removal templates of the simulation study.
/// 1: R at floor(3m/4) gets ceil((n-m)/2), remainder at m.
/// 2: R at floor(m/4) gets ceil((n-m)/2), remainder at floor(3m/4).
/// 3: R at floor(m/4) gets ceil((n-m)/2), remainder at m.
inline CensoringPlan plan_from_template(int tmpl, int n, int m) {
    if (tmpl < 1 || tmpl > 3) throw std::invalid_argument("plan_from_template: template must be 1, 2, or 3");
    if (m < 1 || m > n) throw std::invalid_argument("plan_from_template: require 1 <= m <= n");
    const int q1 = m / 4, q3 = (3 * m) / 4;
    if ((tmpl == 1 && q3 < 1) || (tmpl >= 2 && q1 < 1))
        throw std::invalid_argument("plan_from_template: m too small for this template");
    std::vector<int> R(m, 0);
    const int half = (n - m + 1) / 2; // ceil((n-m)/2)
    const int rest = (n - m) - half;
    switch (tmpl) {
        case 1:
            R[q3 - 1] += half;
            R[m - 1] += rest;
            break;
        case 2:
            R[q1 - 1] += half;
            R[q3 - 1] += rest;
            break;
        case 3:
            R[q1 - 1] += half;
            R[m - 1] += rest;
            break;
    }
    return CensoringPlan(n, m, std::move(R));
}

/// Removals actually executed when j_count failures occurred strictly before the threshold.
/// With j_count < m-1, withdrawals after the threshold stop and the balance leaves at the
/// final failure; with j_count in {m-1, m} the plan runs unchanged.
inline std::vector<int> effective_removals(const CensoringPlan& plan, int j_count) {
    if (j_count < 0 || j_count > plan.m)
        throw std::invalid_argument("effective_removals: j_count out of range");
    std::vector<int> r(plan.m, 0);
    const int cut = std::min(j_count, plan.m - 1);
    int executed = 0;
    for (int j = 0; j < cut; ++j) {
        r[j] = plan.removals[j];
        executed += r[j];
    }
    r[plan.m - 1] += (plan.n - plan.m) - executed;
    return r;
}

/// Units still on test just before the j-th failure (1-based):
/// Gamma_j = n - j + 1 - sum of planned removals executed so far.
inline int risk_set_size(int j, const CensoringPlan& plan, int j_count) {
    if (j < 1 || j > plan.m) throw std::invalid_argument("risk_set_size: j out of range");
    if (j_count < 0 || j_count > plan.m)
        throw std::invalid_argument("risk_set_size: j_count out of range");
    int removed = 0;
    const int cut = std::min(j_count, j - 1);
    for (int l = 0; l < cut; ++l) removed += plan.removals[l];
    const int g = plan.n - j + 1 - removed;
    if (g < 1) throw std::runtime_error("risk_set_size: inconsistent plan (risk set exhausted)");
    return g;
}

/// Observed failure times of one facility plus the threshold-crossing count.
struct FacilitySample {
    CensoringPlan plan;
    double threshold;
    std::vector<double> times;
    int j_count;

    FacilitySample(CensoringPlan p, double thr, std::vector<double> t, int j)
        : plan(std::move(p)), threshold(thr), times(std::move(t)), j_count(j) {
        if (static_cast<int>(times.size()) != plan.m)
            throw std::invalid_argument("FacilitySample: need exactly m times");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(times[i] > 0.0) || (i > 0 && !(times[i] >= times[i - 1])))
                throw std::invalid_argument("FacilitySample: times must be positive and nondecreasing");
        }
        if (j_count < 0 || j_count > plan.m)
            throw std::invalid_argument("FacilitySample: j_count out of range");
    }

    std::vector<int> removals_executed() const { return effective_removals(plan, j_count); }
};

/// Combined sample over all facilities of a block design.
struct BapcsSample {
    std::vector<FacilitySample> facilities;

    explicit BapcsSample(std::vector<FacilitySample> f) : facilities(std::move(f)) {
        if (facilities.empty()) throw std::invalid_argument("BapcsSample: need at least one facility");
    }
    int k() const { return static_cast<int>(facilities.size()); }
    int total_failures() const {
        int s = 0;
        for (const auto& f : facilities) s += f.plan.m;
        return s;
    }
};

/// Simulate one facility under the adaptive scheme by sequential conditional sampling:
/// at step j, t_j = quantile(1 - S_{j-1} * V^(1/gamma_j)) where S is the survival level
/// of the previous failure; planned removals apply only while t_j < threshold.
inline FacilitySample simulate_facility(const IepParams& p, const CensoringPlan& plan,
                                        double threshold, Rng& rng) {
    std::vector<double> times(plan.m);
    double surv = 1.0;
    int alive = plan.n, j_count = 0, executed = 0;
    for (int j = 1; j <= plan.m; ++j) {
        const int gamma = alive;
        if (gamma != risk_set_size(j, plan, std::min(j_count, j - 1)))
            throw std::runtime_error("simulate_facility: risk-set bookkeeping mismatch");
        const double v = rng.uniform();
        surv *= std::pow(v, 1.0 / static_cast<double>(gamma));
        const double t = iep_quantile(1.0 - surv, p);
        times[j - 1] = t;
        const bool before = t < threshold;
        if (before) ++j_count;
        --alive;
        if (j < plan.m && before) {
            const int r = plan.removals[j - 1];
            if (r > alive - (plan.m - j))
                throw std::runtime_error("simulate_facility: removal exceeds available units");
            alive -= r;
            executed += r;
        }
    }
    (void)executed;
    return FacilitySample(plan, threshold, std::move(times), j_count);
}

/// Simulate a whole block; one IepParams per facility, all sharing the same beta.
inline BapcsSample simulate_block(const std::vector<IepParams>& params, const BlockDesign& design,
                                  Rng& rng) {
    if (static_cast<int>(params.size()) != design.k())
        throw std::invalid_argument("simulate_block: need one parameter set per facility");
    for (const auto& p : params)
        if (p.beta != params.front().beta)
            throw std::invalid_argument("simulate_block: facilities must share beta");
    std::vector<FacilitySample> out;
    out.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i)
        out.push_back(simulate_facility(params[i], design.facilities[i].plan,
                                        design.facilities[i].threshold, rng));
    return BapcsSample(std::move(out));
}

/// Convenience overload taking per-facility alphas and the shared beta.
inline BapcsSample simulate_block(const BlockDesign& design, const std::vector<double>& alphas,
                                  double beta, Rng& rng) {
    std::vector<IepParams> params;
    params.reserve(alphas.size());
    for (double a : alphas) params.emplace_back(a, beta);
    return simulate_block(params, design, rng);
}

} // namespace bapcs
