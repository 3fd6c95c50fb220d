#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotic.hpp"
#include "censoring.hpp"
#include "mle.hpp"
#include "pivotal.hpp"

namespace bapcs {

using ordered_json = nlohmann::ordered_json;

namespace detail {

/// +inf thresholds are serialized as the string "inf" since JSON has no infinity literal.
inline ordered_json threshold_to_json(double threshold) {
    if (std::isinf(threshold)) return "inf";
    return threshold;
}

inline double threshold_from_json(const ordered_json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::runtime_error("sample json: threshold string must be \"inf\"");
    }
    return j.get<double>();
}

inline ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed json in " + path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

} // namespace detail

inline ordered_json design_to_json(const BlockDesign& design) {
    ordered_json facilities = ordered_json::array();
    for (const FacilityDesign& f : design.facilities)
        facilities.push_back({{"n", f.plan.n},
                              {"m", f.plan.m},
                              {"removals", f.plan.removals},
                              {"threshold", detail::threshold_to_json(f.threshold)}});
    return {{"facilities", facilities}};
}

inline BlockDesign design_from_json(const ordered_json& j) {
    if (!j.contains("facilities") || !j["facilities"].is_array() || j["facilities"].empty())
        throw std::runtime_error("design json: needs a nonempty \"facilities\" array");
    std::vector<FacilityDesign> facilities;
    for (const auto& f : j["facilities"]) {
        CensoringPlan plan{f.at("n").get<int>(), f.at("m").get<int>(),
                           f.at("removals").get<std::vector<int>>()};
        facilities.push_back(
            FacilityDesign{plan, detail::threshold_from_json(f.at("threshold"))});
    }
    return BlockDesign(std::move(facilities));
}

inline ordered_json sample_to_json(const BapcsSample& sample) {
    ordered_json facilities = ordered_json::array();
    for (const FacilitySample& f : sample.facilities)
        facilities.push_back({{"n", f.plan.n},
                              {"m", f.plan.m},
                              {"removals", f.plan.removals},
                              {"threshold", detail::threshold_to_json(f.threshold)},
                              {"j_count", f.j_count},
                              {"times", f.times}});
    return {{"facilities", facilities}};
}

inline BapcsSample sample_from_json(const ordered_json& j) {
    if (!j.contains("facilities") || !j["facilities"].is_array() || j["facilities"].empty())
        throw std::runtime_error("sample json: needs a nonempty \"facilities\" array");
    std::vector<FacilitySample> facilities;
    for (const auto& f : j["facilities"]) {
        CensoringPlan plan{f.at("n").get<int>(), f.at("m").get<int>(),
                           f.at("removals").get<std::vector<int>>()};
        facilities.push_back(FacilitySample{plan,
                                            detail::threshold_from_json(f.at("threshold")),
                                            f.at("times").get<std::vector<double>>(),
                                            f.at("j_count").get<int>()});
    }
    return BapcsSample(std::move(facilities));
}

inline void write_sample(const BapcsSample& sample, const std::string& path) {
    detail::save_json_file(sample_to_json(sample), path);
}

inline BapcsSample read_sample(const std::string& path) {
    return sample_from_json(detail::load_json_file(path));
}

inline BlockDesign read_design(const std::string& path) {
    return design_from_json(detail::load_json_file(path));
}

namespace detail {

inline ordered_json targets_to_json(const std::vector<TargetEstimate>& targets) {
    ordered_json arr = ordered_json::array();
    for (const TargetEstimate& t : targets)
        arr.push_back({{"name", t.name},
                       {"estimate", t.estimate},
                       {"variance", t.variance},
                       {"lower", t.interval.lower},
                       {"upper", t.interval.upper},
                       {"level", t.interval.level}});
    return arr;
}

} // namespace detail

inline ordered_json estimation_to_json(const EstimationResult& res) {
    ordered_json j;
    j["method"] = "MLE";
    j["beta"] = res.fit.beta_hat;
    j["alpha"] = res.fit.alpha_hats;
    j["alpha_weighted"] = res.fit.alpha_weighted;
    j["loglik"] = res.fit.loglik_at_max;
    j["score_residual"] = res.fit.score_residual;
    j["t_eval"] = res.rc.t;
    j["reliability"] = res.rc.r_hat;
    j["hazard"] = res.rc.h_hat;
    j["mtf"] = res.rc.mtf_hat;
    j["targets"] = detail::targets_to_json(res.targets);
    return j;
}

inline ordered_json pivotal_to_json(const PivotalSummary& summary) {
    ordered_json j;
    j["method"] = "pivotal";
    j["n_draws"] = summary.n_draws;
    j["targets"] = detail::targets_to_json(summary.targets);
    return j;
}

/// Interval table for one method, one row per target.
inline std::string write_intervals_csv(const std::string& method,
                                       const std::vector<TargetEstimate>& targets,
                                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "method,target,estimate,variance,lower,upper,level\n";
    for (const TargetEstimate& t : targets)
        out << method << "," << t.name << "," << fmt(t.estimate) << "," << fmt(t.variance) << ","
            << fmt(t.interval.lower) << "," << fmt(t.interval.upper) << "," << fmt(t.interval.level)
            << "\n";
    return path;
}

} // namespace bapcs
