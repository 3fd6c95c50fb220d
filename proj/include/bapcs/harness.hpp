#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asymptotic.hpp"
#include "censoring.hpp"
#include "distributions.hpp"
#include "pivotal.hpp"
#include "rng.hpp"

namespace bapcs {

inline constexpr const char* kVersionString = "bapcs-1.0.0";

/// One simulation-study configuration (a single setup/plan cell of the tables).
struct StudyConfig {
    int setup_id = 1;
    int plan_template = 1;
    int replications = 2500;
    double true_alpha = 3.5;
    double true_beta = 2.25;
    double t_eval = 0.75;
    double gamma = 0.05;
    int pivotal_draws = 10000;
    std::uint64_t master_seed = 42;
};

/// One row of the study summary table: a (method, target) cell with its aggregates.
struct SummaryRow {
    std::string method; // "MLE" or "pivotal"
    std::string target; // beta, alpha_1..alpha_k, alpha, reliability, hazard, mtf
    double mean_estimate = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double mean_lower = 0.0;
    double mean_upper = 0.0;
    double mean_length = 0.0;
    int dropped = 0;
};

/// The hard-coded simulation designs (Table 1): facility sizes, observable failures,
/// and the common threshold; removal plans come from the requested template.
inline BlockDesign builtin_setup(int setup_id, int plan_template = 1) {
    struct SetupDef {
        std::vector<int> n;
        std::vector<int> m;
        double threshold;
    };
    static const std::vector<SetupDef> defs = {
        {{55, 45, 46, 54}, {45, 36, 34, 45}, 0.75},
        {{55, 60, 50, 60}, {44, 50, 40, 46}, 0.75},
        {{60, 65, 65, 60}, {53, 57, 58, 52}, 0.75},
        {{38, 42, 43, 37, 40}, {32, 32, 38, 28, 30}, 0.5},
        {{44, 48, 40, 45, 48}, {33, 39, 32, 36, 40}, 0.5},
        {{50, 57, 45, 50, 48}, {45, 51, 39, 45, 40}, 0.5},
    };
    if (setup_id < 1 || setup_id > static_cast<int>(defs.size()))
        throw std::invalid_argument("builtin_setup: setup_id must lie in 1..6");
    const SetupDef& def = defs[static_cast<std::size_t>(setup_id - 1)];
    std::vector<FacilityDesign> facilities;
    for (std::size_t i = 0; i < def.n.size(); ++i)
        facilities.push_back(FacilityDesign{
            plan_from_template(plan_template, def.n[i], def.m[i]), def.threshold});
    return BlockDesign(std::move(facilities));
}

namespace detail {

inline int study_thread_count() {
    if (const char* env = std::getenv("BAPCS_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return std::min(v, 256);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Per-replication record; kept indexed so aggregation order never depends on the
/// thread schedule.
struct RepRecord {
    bool mle_ok = false;
    bool piv_ok = false;
    std::vector<double> mle_est, mle_lo, mle_hi;
    std::vector<double> piv_est, piv_lo, piv_hi;
};

inline std::vector<std::string> study_target_names(int k) {
    std::vector<std::string> names;
    names.push_back("beta");
    for (int i = 1; i <= k; ++i) names.push_back("alpha_" + std::to_string(i));
    names.push_back("alpha");
    names.push_back("reliability");
    names.push_back("hazard");
    names.push_back("mtf");
    return names;
}

inline std::vector<double> study_truths(const StudyConfig& cfg, int k) {
    const IepParams truth(cfg.true_alpha, cfg.true_beta);
    std::vector<double> truths;
    truths.push_back(cfg.true_beta);
    for (int i = 0; i < k; ++i) truths.push_back(cfg.true_alpha);
    truths.push_back(cfg.true_alpha);
    truths.push_back(iep_reliability(cfg.t_eval, truth));
    truths.push_back(iep_hazard(cfg.t_eval, truth));
    truths.push_back(iep_mtf(truth));
    return truths;
}

inline void summarize_method(std::vector<SummaryRow>& rows, const std::string& method,
                             const std::vector<RepRecord>& reps, bool RepRecord::*ok,
                             std::vector<double> RepRecord::*est, std::vector<double> RepRecord::*lo,
                             std::vector<double> RepRecord::*hi,
                             const std::vector<std::string>& names,
                             const std::vector<double>& truths, int total_reps) {
    const std::size_t n_targets = names.size();
    for (std::size_t t = 0; t < n_targets; ++t) {
        double sum = 0.0, sum_lo = 0.0, sum_hi = 0.0, sum_len = 0.0;
        int used = 0;
        for (const RepRecord& r : reps) {
            if (!(r.*ok)) continue;
            sum += (r.*est)[t];
            sum_lo += (r.*lo)[t];
            sum_hi += (r.*hi)[t];
            sum_len += (r.*hi)[t] - (r.*lo)[t];
            ++used;
        }
        SummaryRow row;
        row.method = method;
        row.target = names[t];
        row.dropped = total_reps - used;
        if (used > 0) {
            const double mean = sum / used;
            double ss = 0.0;
            for (const RepRecord& r : reps)
                if (r.*ok) ss += ((r.*est)[t] - mean) * ((r.*est)[t] - mean);
            row.mean_estimate = mean;
            row.bias = mean - truths[t];
            row.variance = ss / used;
            row.mean_lower = sum_lo / used;
            row.mean_upper = sum_hi / used;
            row.mean_length = sum_len / used;
        }
        rows.push_back(row);
    }
}

} // namespace detail

/// Runs the full simulation study for one config: simulate, fit by both methods,
/// aggregate per-target summaries. Replications run on a worker pool; per-replication
/// RNG substreams and indexed aggregation make the result independent of thread count.
inline std::vector<SummaryRow> run_study(const StudyConfig& cfg) {
    if (cfg.replications < 1) throw std::invalid_argument("run_study: replications must be >= 1");
    const BlockDesign design = builtin_setup(cfg.setup_id, cfg.plan_template);
    const int k = design.k();
    const std::vector<double> alphas(static_cast<std::size_t>(k), cfg.true_alpha);
    const auto names = detail::study_target_names(k);
    const auto truths = detail::study_truths(cfg, k);
    const std::size_t n_targets = names.size();

    std::vector<detail::RepRecord> reps(static_cast<std::size_t>(cfg.replications));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= cfg.replications) break;
            detail::RepRecord& rec = reps[static_cast<std::size_t>(r)];
            Rng rng = Rng::derive(cfg.master_seed,
                                  {static_cast<std::uint64_t>(cfg.setup_id),
                                   static_cast<std::uint64_t>(cfg.plan_template),
                                   static_cast<std::uint64_t>(r)});
            std::optional<BapcsSample> sample;
            try {
                sample.emplace(simulate_block(design, alphas, cfg.true_beta, rng));
            } catch (const std::exception&) {
                continue; // drop both methods for this replication
            }
            try {
                const EstimationResult est = estimate_block(*sample, cfg.gamma, cfg.t_eval);
                rec.mle_est.resize(n_targets);
                rec.mle_lo.resize(n_targets);
                rec.mle_hi.resize(n_targets);
                for (std::size_t t = 0; t < n_targets; ++t) {
                    rec.mle_est[t] = est.targets[t].estimate;
                    rec.mle_lo[t] = est.targets[t].interval.lower;
                    rec.mle_hi[t] = est.targets[t].interval.upper;
                }
                rec.mle_ok = true;
            } catch (const std::exception&) {
                rec.mle_ok = false;
            }
            try {
                const auto [draws, summary] = algorithm1(*sample, cfg.pivotal_draws, cfg.gamma,
                                                         cfg.t_eval, rng);
                (void)draws;
                rec.piv_est.resize(n_targets);
                rec.piv_lo.resize(n_targets);
                rec.piv_hi.resize(n_targets);
                for (std::size_t t = 0; t < n_targets; ++t) {
                    rec.piv_est[t] = summary.targets[t].estimate;
                    rec.piv_lo[t] = summary.targets[t].interval.lower;
                    rec.piv_hi[t] = summary.targets[t].interval.upper;
                }
                rec.piv_ok = true;
            } catch (const std::exception&) {
                rec.piv_ok = false;
            }
        }
    };

    const int n_threads = std::min(detail::study_thread_count(), cfg.replications);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SummaryRow> rows;
    detail::summarize_method(rows, "MLE", reps, &detail::RepRecord::mle_ok,
                             &detail::RepRecord::mle_est, &detail::RepRecord::mle_lo,
                             &detail::RepRecord::mle_hi, names, truths, cfg.replications);
    detail::summarize_method(rows, "pivotal", reps, &detail::RepRecord::piv_ok,
                             &detail::RepRecord::piv_est, &detail::RepRecord::piv_lo,
                             &detail::RepRecord::piv_hi, names, truths, cfg.replications);
    return rows;
}

inline constexpr const char* kSummaryHeader =
    "method,target,mean_estimate,bias,variance,mean_lower,mean_upper,mean_length,dropped";

/// Writes the summary table as CSV with a fixed header and 17-significant-digit values.
inline std::string emit_table(const std::vector<SummaryRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_table: rows must be nonempty");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_table: cannot open " + path);
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << kSummaryHeader << "\n";
    for (const SummaryRow& r : rows)
        out << r.method << "," << r.target << "," << fmt(r.mean_estimate) << "," << fmt(r.bias)
            << "," << fmt(r.variance) << "," << fmt(r.mean_lower) << "," << fmt(r.mean_upper)
            << "," << fmt(r.mean_length) << "," << r.dropped << "\n";
    return path;
}

/// Parses emit_table output back; %.17g round-trips doubles exactly.
inline std::vector<SummaryRow> parse_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_table: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader)
        throw std::runtime_error("parse_table: unexpected header in " + path);
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) throw std::runtime_error("parse_table: malformed row in " + path);
        SummaryRow r;
        r.method = fields[0];
        r.target = fields[1];
        r.mean_estimate = std::strtod(fields[2].c_str(), nullptr);
        r.bias = std::strtod(fields[3].c_str(), nullptr);
        r.variance = std::strtod(fields[4].c_str(), nullptr);
        r.mean_lower = std::strtod(fields[5].c_str(), nullptr);
        r.mean_upper = std::strtod(fields[6].c_str(), nullptr);
        r.mean_length = std::strtod(fields[7].c_str(), nullptr);
        r.dropped = std::atoi(fields[8].c_str());
        rows.push_back(r);
    }
    return rows;
}

/// Writes the run manifest: config, version string, and dropped-replication counts.
/// Deliberately free of timestamps and thread counts so reruns are byte-identical.
inline std::string write_manifest(const StudyConfig& cfg, const std::vector<SummaryRow>& rows,
                                  const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = kVersionString;
    j["config"] = {{"setup_id", cfg.setup_id},
                   {"plan_template", cfg.plan_template},
                   {"replications", cfg.replications},
                   {"true_alpha", cfg.true_alpha},
                   {"true_beta", cfg.true_beta},
                   {"t_eval", cfg.t_eval},
                   {"gamma", cfg.gamma},
                   {"pivotal_draws", cfg.pivotal_draws},
                   {"master_seed", cfg.master_seed}};
    int dropped_mle = 0, dropped_piv = 0;
    for (const SummaryRow& r : rows) {
        if (r.method == "MLE") dropped_mle = std::max(dropped_mle, r.dropped);
        else dropped_piv = std::max(dropped_piv, r.dropped);
    }
    j["dropped"] = {{"MLE", dropped_mle}, {"pivotal", dropped_piv}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
    out << j.dump(2) << "\n";
    return path;
}

} // namespace bapcs
