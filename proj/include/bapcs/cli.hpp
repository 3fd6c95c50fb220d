#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asymptotic.hpp"
#include "censoring.hpp"
#include "gof.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "mle.hpp"
#include "pivotal.hpp"
#include "rng.hpp"

namespace bapcs {

/// Parses whitespace-, newline-, or comma-separated positive decimals.
/// Parse failures name the offending line and column.
inline DataSet ingest_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file: " + path);
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t pos = 0;
        while (pos < line.size()) {
            if (line[pos] == ',' || std::isspace(static_cast<unsigned char>(line[pos]))) {
                ++pos;
                continue;
            }
            const std::size_t start = pos;
            while (pos < line.size() && line[pos] != ',' &&
                   !std::isspace(static_cast<unsigned char>(line[pos])))
                ++pos;
            const std::string token = line.substr(start, pos - start);
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size())
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ", column " + std::to_string(start + 1) +
                                         ": not a number: '" + token + "'");
            if (!(v > 0.0))
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ", column " + std::to_string(start + 1) +
                                         ": values must be positive, got '" + token + "'");
            values.push_back(v);
        }
    }
    return DataSet(values);
}

namespace cli {

inline const char* file_format_help() {
    return R"(File formats:
  design JSON (simulate --design):
    {"facilities": [{"n": 55, "m": 45, "removals": [0,...,5,...], "threshold": 0.75}, ...]}
    removals has m entries summing to n-m; threshold may be the string "inf".
  sample JSON (simulate output; estimate/pivotal --sample):
    {"facilities": [{"n":..., "m":..., "removals":[...], "threshold":...,
                     "j_count":..., "times":[...]}, ...]}
    times are the m ordered failure times; j_count counts failures before the threshold.
  data text (fit-data/plot-data --data):
    positive decimals separated by whitespace, newlines, or commas.
  estimate output: fit.json (point estimates, observed-information intervals)
                   and intervals.csv (method,target,estimate,variance,lower,upper,level).
  pivotal output:  pivotal.json and intervals.csv in the same shapes.
  simstudy output: setup<i>_plan<j>.csv with header
    method,target,mean_estimate,bias,variance,mean_lower,mean_upper,mean_length,dropped
    plus manifest.json (config, version, dropped counts).
  fit-data output: gof_table.csv
    (model,par_names,mle_1,mle_2,loglik,aic,bic,caic,hqic,ks_stat,ks_pvalue).
  plot-data output: ecdf.csv, hist.csv, ttt.csv, pp_<model>.csv, qq_<model>.csv.)";
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

/// Runs the command line (without the program name). Returns the process exit status:
/// 0 success, 1 computational or I/O failure, 2 usage error.
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"bapcs: inference for the inverted exponentiated Pareto lifetime model\n"
                 "under block adaptive progressive Type-II censoring"};
    app.footer(file_format_help());
    app.require_subcommand(1);

    // simulate
    std::string sim_design, sim_out;
    std::vector<double> sim_alphas;
    double sim_beta = 2.25;
    std::uint64_t sim_seed = 1;
    CLI::App* sim = app.add_subcommand("simulate", "Simulate one BAPCS sample from a design file");
    sim->add_option("--design", sim_design, "design JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--alpha", sim_alphas, "facility alphas (one value broadcasts)")
        ->required()
        ->delimiter(',');
    sim->add_option("--beta", sim_beta, "shared beta")->required();
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "output sample JSON path")->required();

    // estimate
    std::string est_sample, est_out;
    double est_gamma = 0.05, est_t = 0.75;
    CLI::App* est = app.add_subcommand("estimate", "MLE point and interval estimation");
    est->add_option("--sample", est_sample, "sample JSON file")->required()->check(CLI::ExistingFile);
    est->add_option("--gamma", est_gamma, "interval significance level (default 0.05)");
    est->add_option("--t", est_t, "reliability evaluation time (default 0.75)");
    est->add_option("--out", est_out, "output directory")->required();

    // pivotal
    std::string piv_sample, piv_out;
    int piv_draws = 10000;
    double piv_gamma = 0.05, piv_t = 0.75;
    std::uint64_t piv_seed = 1;
    CLI::App* piv = app.add_subcommand("pivotal", "Pivotal estimation and generalized intervals");
    piv->add_option("--sample", piv_sample, "sample JSON file")->required()->check(CLI::ExistingFile);
    piv->add_option("--draws", piv_draws, "Monte Carlo draws N (default 10000)")
        ->check(CLI::Range(1000, 100000000));
    piv->add_option("--gamma", piv_gamma, "interval significance level (default 0.05)");
    piv->add_option("--t", piv_t, "reliability evaluation time (default 0.75)");
    piv->add_option("--seed", piv_seed, "RNG seed")->required();
    piv->add_option("--out", piv_out, "output directory")->required();

    // simstudy
    StudyConfig cfg;
    std::string study_out;
    bool fast = false;
    CLI::App* study = app.add_subcommand("simstudy", "Simulation study for one setup/plan cell");
    study->add_option("--setup", cfg.setup_id, "setup id 1..6")->required()->check(CLI::Range(1, 6));
    study->add_option("--plan", cfg.plan_template, "plan template 1..3")
        ->required()
        ->check(CLI::Range(1, 3));
    study->add_option("--reps", cfg.replications, "replications (default 2500)");
    study->add_option("--seed", cfg.master_seed, "master seed")->required();
    study->add_option("--out-dir", study_out, "output directory")->required();
    study->add_option("--pivotal-draws", cfg.pivotal_draws, "pivotal draws per replication");
    study->add_option("--gamma", cfg.gamma, "interval significance level (default 0.05)");
    study->add_option("--t", cfg.t_eval, "reliability evaluation time (default 0.75)");
    study->add_option("--alpha", cfg.true_alpha, "true alpha (default 3.5)");
    study->add_option("--beta", cfg.true_beta, "true beta (default 2.25)");
    study->add_flag("--fast", fast, "quick mode: 250 replications");

    // fit-data
    std::string fit_data_path, fit_out;
    CLI::App* fit = app.add_subcommand("fit-data", "Fit all candidate models to a complete sample");
    fit->add_option("--data", fit_data_path, "data text file")->required()->check(CLI::ExistingFile);
    fit->add_option("--out-dir", fit_out, "output directory")->required();

    // plot-data
    std::string plot_data_path, plot_out;
    CLI::App* plot = app.add_subcommand("plot-data", "Emit plot series (ECDF, hist, P-P, Q-Q, TTT)");
    plot->add_option("--data", plot_data_path, "data text file")->required()->check(CLI::ExistingFile);
    plot->add_option("--out-dir", plot_out, "output directory")->required();

    std::vector<const char*> argv;
    argv.push_back("bapcs");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for usage and file formats\n";
        return 2;
    }

    try {
        if (sim->parsed()) {
            const BlockDesign design = read_design(sim_design);
            std::vector<double> alphas = sim_alphas;
            if (alphas.size() == 1) alphas.assign(static_cast<std::size_t>(design.k()), alphas[0]);
            if (static_cast<int>(alphas.size()) != design.k())
                throw std::runtime_error("simulate: need 1 or k alpha values");
            Rng rng(sim_seed);
            const BapcsSample sample = simulate_block(design, alphas, sim_beta, rng);
            write_sample(sample, sim_out);
            std::cout << "wrote " << sim_out << " (" << sample.total_failures() << " failures in "
                      << sample.k() << " facilities)\n";
        } else if (est->parsed()) {
            const BapcsSample sample = read_sample(est_sample);
            const EstimationResult res = estimate_block(sample, est_gamma, est_t);
            ensure_dir(est_out);
            detail::save_json_file(estimation_to_json(res), est_out + "/fit.json");
            write_intervals_csv("MLE", res.targets, est_out + "/intervals.csv");
            std::cout << "wrote " << est_out << "/fit.json and " << est_out << "/intervals.csv\n";
        } else if (piv->parsed()) {
            const BapcsSample sample = read_sample(piv_sample);
            Rng rng(piv_seed);
            const auto [draws, summary] = algorithm1(sample, piv_draws, piv_gamma, piv_t, rng);
            (void)draws;
            ensure_dir(piv_out);
            detail::save_json_file(pivotal_to_json(summary), piv_out + "/pivotal.json");
            write_intervals_csv("pivotal", summary.targets, piv_out + "/intervals.csv");
            std::cout << "wrote " << piv_out << "/pivotal.json and " << piv_out
                      << "/intervals.csv\n";
        } else if (study->parsed()) {
            if (fast) cfg.replications = 250;
            ensure_dir(study_out);
            const std::vector<SummaryRow> rows = run_study(cfg);
            const std::string csv = study_out + "/setup" + std::to_string(cfg.setup_id) + "_plan" +
                                    std::to_string(cfg.plan_template) + ".csv";
            emit_table(rows, csv);
            write_manifest(cfg, rows, study_out + "/manifest.json");
            std::cout << "wrote " << csv << " and " << study_out << "/manifest.json\n";
        } else if (fit->parsed()) {
            const DataSet data = ingest_data(fit_data_path);
            const std::vector<GofReport> reports = fit_all_models(data);
            ensure_dir(fit_out);
            write_gof_table(reports, fit_out + "/gof_table.csv");
            std::cout << "model par_names mle_1 mle_2 aic bic caic hqic ks pvalue\n";
            for (const GofReport& r : reports) {
                std::ostringstream row;
                row.precision(6);
                row << r.model << " " << r.par_names << " " << r.p1 << " " << r.p2 << " "
                    << r.criteria.aic << " " << r.criteria.bic << " " << r.criteria.caic << " "
                    << r.criteria.hqic << " " << r.ks_stat << " " << r.ks_pvalue;
                std::cout << row.str() << "\n";
            }
            std::cout << "wrote " << fit_out << "/gof_table.csv\n";
        } else if (plot->parsed()) {
            const DataSet data = ingest_data(plot_data_path);
            const std::vector<GofReport> reports = fit_all_models(data);
            ensure_dir(plot_out);
            for (const std::string& path : plot_data(data, reports, plot_out))
                std::cout << "wrote " << path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace cli
} // namespace bapcs
