#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace firm::cli {

/// Shared output sink: stdout always gets the human-readable report; when
/// `out_path` is set the same table is also written there as CSV or JSON.
struct OutputOptions {
    std::string out_path;
    std::string format = "csv"; // csv | json
};

struct ScoreOptions {
    std::string config_path;
    std::string data_path;
    std::string table_out; // optional contingency CSV (a = 0 only)
    OutputOptions output;
};

struct SweepOptions {
    std::string config_path;
    std::string data_path;
    std::string grid = "0.05:0.95:0.05";
    OutputOptions output;
};

struct CompareOptions {
    std::string config_path;
    std::string data_path_a;
    std::string data_path_b;
    std::string method = "all"; // t | dm | bootstrap | all
    double level = 0.95;
    int horizon = 1;
    std::size_t block_length = 0; // 0: round(sqrt(n))
    std::size_t replicates = 27000;
    std::uint64_t seed = 1;
    std::string one_sided; // "", "greater" or "less"
    OutputOptions output;
};

struct EstimateAlphaOptions {
    std::string table_path;  // contingency grid CSV, or
    std::string config_path; // config + dataset
    std::string data_path;
    std::size_t split_after = 0;
    OutputOptions output;
};

struct PodFarOptions {
    std::string alphas = "0.05:0.95:0.05";
    std::string base_rates = "0.01,0.05,0.1,0.25";
    std::string rel_uncertainties = "0.01,0.1,0.25,0.5";
    std::size_t cases_per_trial = 365;
    std::size_t trials = 0; // 0: adaptive until the standard error bound holds
    double se_target = 0.008;
    double pod_target = 0.7;
    double far_limit = 0.4;
    std::uint64_t seed = 1;
    OutputOptions output;
};

struct AlphaBiasOptions {
    std::string alphas = "0.05:0.95:0.05";
    std::string base_rates = "0.01,0.05,0.1,0.25";
    std::string rel_uncertainties = "0.01,0.1,0.25,0.5";
    std::size_t cases = 1000000;
    std::uint64_t seed = 1;
    OutputOptions output;
};

struct LeadTimeOptions {
    double alpha = 0.75;
    double mu = 0.0;
    double sigma = 1.0;
    double base_rate = 0.1;
    double rel_uncertainty = 0.25;
    double early_rel_uncertainty = 0.5;
    double penalty_late = 1.0;     // no early warning, standard warns
    double penalty_retract = 15.0; // early warning withdrawn at standard time
    std::string betas = "0.05:0.95:0.05";
    std::size_t cases = 100000;
    std::uint64_t seed = 1;
    OutputOptions output;
};

void run_score(const ScoreOptions& options, std::ostream& console);
void run_sweep_beta(const SweepOptions& options, std::ostream& console);
void run_sweep_alpha(const SweepOptions& options, std::ostream& console);
void run_compare(const CompareOptions& options, std::ostream& console);
void run_estimate_alpha(const EstimateAlphaOptions& options, std::ostream& console);
void run_pod_far(const PodFarOptions& options, std::ostream& console);
void run_alpha_bias(const AlphaBiasOptions& options, std::ostream& console);
void run_leadtime(const LeadTimeOptions& options, std::ostream& console);

/// "lo:hi:step" or a comma-separated list, strictly increasing.
std::vector<double> parse_grid(const std::string& text);

} // namespace firm::cli
