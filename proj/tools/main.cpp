#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "firm/errors.hpp"

namespace {

// exit codes: 0 success, 2 schema/usage error, 3 numerical failure,
// 1 anything unexpected
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;

void add_output_flags(CLI::App* cmd, firm::cli::OutputOptions& options) {
    cmd->add_option("--out", options.out_path, "Write the result table to this file");
    cmd->add_option("--format", options.format, "Output file format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FIRM scoring for ordered categorical forecasts"};
    app.require_subcommand(1);

    firm::cli::ScoreOptions score;
    auto* score_cmd = app.add_subcommand("score", "Score a dataset against a service config");
    score_cmd->add_option("--config", score.config_path, "Service config JSON")->required();
    score_cmd->add_option("--data", score.data_path, "Forecast dataset CSV")->required();
    score_cmd->add_option("--table-out", score.table_out, "Write the contingency table CSV here");
    add_output_flags(score_cmd, score.output);

    firm::cli::SweepOptions sweep_beta;
    auto* sweep_beta_cmd = app.add_subcommand(
        "sweep-beta", "Score while the decision quantile level beta varies (matrix keeps alpha)");
    sweep_beta_cmd->add_option("--config", sweep_beta.config_path, "Service config JSON")
        ->required();
    sweep_beta_cmd->add_option("--data", sweep_beta.data_path, "Dataset with distribution forecasts")
        ->required();
    sweep_beta_cmd->add_option("--betas", sweep_beta.grid, "Beta grid (lo:hi:step or list)");
    add_output_flags(sweep_beta_cmd, sweep_beta.output);

    firm::cli::SweepOptions sweep_alpha;
    auto* sweep_alpha_cmd = app.add_subcommand(
        "sweep-alpha", "Score while alpha varies (matrix and directive move together)");
    sweep_alpha_cmd->add_option("--config", sweep_alpha.config_path, "Service config JSON")
        ->required();
    sweep_alpha_cmd
        ->add_option("--data", sweep_alpha.data_path, "Dataset with distribution forecasts")
        ->required();
    sweep_alpha_cmd->add_option("--alphas", sweep_alpha.grid, "Alpha grid (lo:hi:step or list)");
    add_output_flags(sweep_alpha_cmd, sweep_alpha.output);

    firm::cli::CompareOptions compare;
    auto* compare_cmd =
        app.add_subcommand("compare", "Confidence intervals for the difference in mean scores");
    compare_cmd->add_option("--config", compare.config_path, "Service config JSON")->required();
    compare_cmd->add_option("--data-a", compare.data_path_a, "Dataset of system A")->required();
    compare_cmd->add_option("--data-b", compare.data_path_b, "Dataset of system B")->required();
    compare_cmd->add_option("--method", compare.method, "t, dm, bootstrap or all");
    compare_cmd->add_option("--level", compare.level, "Confidence level (default 0.95)");
    compare_cmd->add_option("--horizon", compare.horizon, "Forecast horizon for the DM variance");
    compare_cmd->add_option("--block-length", compare.block_length,
                            "Bootstrap block length (0: round(sqrt(n)))");
    compare_cmd->add_option("--replicates", compare.replicates, "Bootstrap replicates");
    compare_cmd->add_option("--seed", compare.seed, "Bootstrap seed");
    compare_cmd->add_option("--one-sided", compare.one_sided,
                            "Also run a one-sided test: greater or less");
    add_output_flags(compare_cmd, compare.output);

    firm::cli::EstimateAlphaOptions estimate;
    auto* estimate_cmd = app.add_subcommand(
        "estimate-alpha", "Estimate the implicit risk parameter of an existing warning service");
    estimate_cmd->add_option("--table", estimate.table_path, "Contingency table CSV");
    estimate_cmd->add_option("--config", estimate.config_path, "Service config JSON");
    estimate_cmd->add_option("--data", estimate.data_path, "Forecast dataset CSV");
    estimate_cmd->add_option("--split-after", estimate.split_after,
                             "Merge categories above this index into the event");
    add_output_flags(estimate_cmd, estimate.output);

    auto* synthetic_cmd = app.add_subcommand("synthetic", "Synthetic-system experiments");
    synthetic_cmd->require_subcommand(1);

    firm::cli::PodFarOptions pod_far;
    auto* pod_far_cmd = synthetic_cmd->add_subcommand(
        "pod-far", "Probability of meeting POD/FAR targets under a fixed-risk directive");
    pod_far_cmd->add_option("--alphas", pod_far.alphas, "Alpha grid");
    pod_far_cmd->add_option("--base-rates", pod_far.base_rates, "Base-rate grid");
    pod_far_cmd->add_option("--rel-uncertainties", pod_far.rel_uncertainties,
                            "Relative predictive uncertainty grid");
    pod_far_cmd->add_option("--cases-per-trial", pod_far.cases_per_trial, "Cases per trial");
    pod_far_cmd->add_option("--trials", pod_far.trials, "Trials (0: adaptive)");
    pod_far_cmd->add_option("--se-target", pod_far.se_target,
                            "Standard-error bound for adaptive trials");
    pod_far_cmd->add_option("--pod-target", pod_far.pod_target, "POD target");
    pod_far_cmd->add_option("--far-limit", pod_far.far_limit, "FAR limit");
    pod_far_cmd->add_option("--seed", pod_far.seed, "Seed");
    add_output_flags(pod_far_cmd, pod_far.output);

    firm::cli::AlphaBiasOptions alpha_bias;
    auto* alpha_bias_cmd = synthetic_cmd->add_subcommand(
        "alpha-bias", "Bias of implicit-risk estimators on calibrated synthetic systems");
    alpha_bias_cmd->add_option("--alphas", alpha_bias.alphas, "Alpha grid");
    alpha_bias_cmd->add_option("--base-rates", alpha_bias.base_rates, "Base-rate grid");
    alpha_bias_cmd->add_option("--rel-uncertainties", alpha_bias.rel_uncertainties,
                               "Relative predictive uncertainty grid");
    alpha_bias_cmd->add_option("--cases", alpha_bias.cases, "Cases per grid point");
    alpha_bias_cmd->add_option("--seed", alpha_bias.seed, "Seed");
    add_output_flags(alpha_bias_cmd, alpha_bias.output);

    firm::cli::LeadTimeOptions leadtime;
    auto* leadtime_cmd = synthetic_cmd->add_subcommand(
        "leadtime", "Optimise the early-warning quantile level against a retraction penalty");
    leadtime_cmd->add_option("--alpha", leadtime.alpha, "Standard-lead-time risk parameter");
    leadtime_cmd->add_option("--mu", leadtime.mu, "Climate mean");
    leadtime_cmd->add_option("--sigma", leadtime.sigma, "Climate standard deviation");
    leadtime_cmd->add_option("--base-rate", leadtime.base_rate, "Event base rate");
    leadtime_cmd->add_option("--rel-uncertainty", leadtime.rel_uncertainty,
                             "Standard system relative uncertainty");
    leadtime_cmd->add_option("--early-rel-uncertainty", leadtime.early_rel_uncertainty,
                             "Early system relative uncertainty");
    leadtime_cmd->add_option("--penalty-late", leadtime.penalty_late,
                             "Cost of warning only at standard lead time");
    leadtime_cmd->add_option("--penalty-retract", leadtime.penalty_retract,
                             "Cost of retracting an early warning");
    leadtime_cmd->add_option("--betas", leadtime.betas, "Beta grid");
    leadtime_cmd->add_option("--cases", leadtime.cases, "Paired cases to simulate");
    leadtime_cmd->add_option("--seed", leadtime.seed, "Seed");
    add_output_flags(leadtime_cmd, leadtime.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitSchema;
    }

    try {
        if (score_cmd->parsed()) firm::cli::run_score(score, std::cout);
        else if (sweep_beta_cmd->parsed()) firm::cli::run_sweep_beta(sweep_beta, std::cout);
        else if (sweep_alpha_cmd->parsed()) firm::cli::run_sweep_alpha(sweep_alpha, std::cout);
        else if (compare_cmd->parsed()) firm::cli::run_compare(compare, std::cout);
        else if (estimate_cmd->parsed()) firm::cli::run_estimate_alpha(estimate, std::cout);
        else if (pod_far_cmd->parsed()) firm::cli::run_pod_far(pod_far, std::cout);
        else if (alpha_bias_cmd->parsed()) firm::cli::run_alpha_bias(alpha_bias, std::cout);
        else if (leadtime_cmd->parsed()) firm::cli::run_leadtime(leadtime, std::cout);
        return 0;
    } catch (const firm::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const firm::SolverError& e) {
        std::cerr << "numerical error: " << e.what() << " (bracket [" << e.bracket_lo << ", "
                  << e.bracket_hi << "])\n";
        return kExitNumerical;
    } catch (const firm::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
