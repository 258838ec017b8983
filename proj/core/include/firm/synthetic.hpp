#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "firm/distribution.hpp"

namespace firm {

/// Idealised dichotomous forecasting setup: the climate is
/// Y ~ N(mu, sigma^2), split as Y = Y1 + Y2 with Y1 ~ N(mu, sigma1^2) and
/// Y2 ~ N(0, sigma2^2) independent. The system observes Y1 and issues the
/// perfectly calibrated predictive distribution N(Y1, sigma2^2).
/// sigma2/sigma is the relative predictive uncertainty (0 = perfect
/// foresight, 1 = climatology); the event threshold theta1 is pinned by the
/// base rate via theta1 = mu + sigma * Phi^-1(1 - base_rate).
struct SyntheticSystem {
    double mu = 0.0;
    double sigma = 1.0;
    double rel_uncertainty = 0.5;
    double base_rate = 0.1;

    void validate() const;
    double sigma2() const { return rel_uncertainty * sigma; }
    double sigma1() const;
    double theta1() const;
};

struct SyntheticCase {
    PredictiveDistribution predictive;
    double observation;
};

/// Draw one forecast case. With rel_uncertainty = 0 the predictive collapses
/// (numerically) to a point mass at the observation; with 1 it is the
/// climate distribution for every case.
SyntheticCase draw_case(const SyntheticSystem& system, std::mt19937_64& rng);

struct PodFarOutcome {
    double success_probability = 0.0;
    std::size_t trials = 0;
    double standard_error = 0.0;
};

/// Fraction of independent trials whose contingency table meets
/// POD >= pod_target and FAR <= far_limit when warning iff the forecast
/// event probability exceeds 1-alpha. A trial with undefined POD or FAR
/// counts as missed. With trials = 0 the trial count grows adaptively until
/// the binomial standard error drops below se_target.
PodFarOutcome pod_far_target_experiment(const SyntheticSystem& system, double alpha,
                                        std::size_t cases_per_trial, std::size_t trials,
                                        std::uint64_t seed, double se_target = 0.008,
                                        double pod_target = 0.7, double far_limit = 0.4);

struct AlphaBiasPoint {
    double alpha = 0.0;
    std::optional<double> alpha_hat;   // f/(f+m); missing when f+m = 0
    std::optional<double> alpha_tilde; // signal-detection estimate; missing at POD/POFD in {0,1}
};

/// Simulate warn-iff-P(event)>1-alpha decisions for each alpha in the grid
/// and estimate the implicit risk parameter from the resulting table with
/// both estimators.
std::vector<AlphaBiasPoint> alpha_bias_experiment(const SyntheticSystem& system,
                                                  std::span<const double> alpha_grid,
                                                  std::size_t cases, std::uint64_t seed);

struct EventWarnProbabilities {
    double p_event = 0.0; // P(Y > theta)
    double p_warn = 0.0;  // P(Y1 > theta): warn at the alpha = 1/2 directive
};

/// Closed-form event and warning probabilities for the median directive.
/// For theta > mu warnings are strictly rarer than events, so misses
/// outnumber false alarms despite perfect calibration.
EventWarnProbabilities miss_vs_warn_probability(const SyntheticSystem& system, double theta);

/// Cost t[early][standard] of the early-versus-standard decision pattern;
/// diagonal (agreement) must be zero.
struct LeadTimePenalty {
    std::array<std::array<double, 2>, 2> entries{{{0.0, 1.0}, {15.0, 0.0}}};

    void validate() const;
    double at(bool early_warn, bool standard_warn) const {
        return entries[early_warn ? 1 : 0][standard_warn ? 1 : 0];
    }
};

/// Predictive distributions issued for the same case at the early and the
/// standard lead time. Both are calibrated for the same outcome; the early
/// one is based on a coarser signal.
struct PairedForecastCase {
    PredictiveDistribution early;
    PredictiveDistribution standard;
};

/// Draw a paired case: the standard system is `system`, the early system
/// sees the same signal degraded to early_rel_uncertainty (which must be at
/// least the standard's).
PairedForecastCase draw_paired_case(const SyntheticSystem& system,
                                    double early_rel_uncertainty, std::mt19937_64& rng);

struct BetaSweepPoint {
    double beta = 0.0;
    double score = 0.0; // total penalty S(beta, alpha) over the cases
};

struct BetaSweepResult {
    double best_beta = 0.0;
    std::vector<BetaSweepPoint> points;
};

/// Sweep the early-warning quantile level beta: the early system warns iff
/// its beta-quantile exceeds theta, the standard system warns iff its
/// alpha-quantile does, and each case is charged penalty.at(early, standard).
/// Returns the grid scores and the smallest beta attaining the minimum.
BetaSweepResult optimize_early_beta(std::span<const PairedForecastCase> cases, double alpha,
                                    double theta, const LeadTimePenalty& penalty,
                                    std::span<const double> beta_grid);

/// Kolmogorov-Smirnov statistic of a sample against the uniform law on
/// [0,1]; used for PIT calibration checks.
double ks_statistic_uniform(std::vector<double> values);

} // namespace firm
