#include "firm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "firm/detail/rng.hpp"
#include "firm/errors.hpp"
#include "firm/normal.hpp"
#include "firm/verification.hpp"

namespace firm {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Predictive sd of an exact system is 0; keep the Gaussian representation
// valid while collapsing quantiles onto the mean at double precision.
constexpr double kMinSd = 1e-300;

// Warn iff the alpha-quantile of N(y1, sigma2^2) exceeds theta, i.e.
// y1 > theta - sigma2 * Phi^-1(alpha).
double warn_signal_threshold(const SyntheticSystem& system, double alpha) {
    return system.theta1() - system.sigma2() * norm_quantile(alpha);
}

BinaryCounts simulate_counts(const SyntheticSystem& system, double alpha, std::size_t cases,
                             std::mt19937_64& rng) {
    const double u = warn_signal_threshold(system, alpha);
    const double theta = system.theta1();
    std::normal_distribution<double> signal(system.mu, system.sigma1());
    std::normal_distribution<double> noise(0.0, system.sigma2() > 0.0 ? system.sigma2() : 1.0);
    BinaryCounts c;
    for (std::size_t k = 0; k < cases; ++k) {
        const double y1 = system.sigma1() > 0.0 ? signal(rng) : system.mu;
        const double y2 = system.sigma2() > 0.0 ? noise(rng) : 0.0;
        const bool warn = y1 > u;
        const bool event = y1 + y2 > theta;
        if (warn && event) ++c.hits;
        else if (!warn && event) ++c.misses;
        else if (warn && !event) ++c.false_alarms;
        else ++c.correct_negatives;
    }
    return c;
}

} // namespace

void SyntheticSystem::validate() const {
    require(std::isfinite(mu), "SyntheticSystem: mu must be finite");
    require(sigma > 0.0 && std::isfinite(sigma), "SyntheticSystem: sigma must be positive");
    require(rel_uncertainty >= 0.0 && rel_uncertainty <= 1.0,
            "SyntheticSystem: relative uncertainty must lie in [0,1]");
    require(base_rate > 0.0 && base_rate < 1.0,
            "SyntheticSystem: base rate must lie strictly in (0,1)");
}

double SyntheticSystem::sigma1() const {
    const double s2 = sigma2();
    return std::sqrt(std::max(0.0, sigma * sigma - s2 * s2));
}

double SyntheticSystem::theta1() const {
    return mu + sigma * norm_quantile(1.0 - base_rate);
}

SyntheticCase draw_case(const SyntheticSystem& system, std::mt19937_64& rng) {
    system.validate();
    const double s1 = system.sigma1();
    const double s2 = system.sigma2();
    std::normal_distribution<double> signal(system.mu, s1 > 0.0 ? s1 : 1.0);
    std::normal_distribution<double> noise(0.0, s2 > 0.0 ? s2 : 1.0);
    const double y1 = s1 > 0.0 ? signal(rng) : system.mu;
    const double y2 = s2 > 0.0 ? noise(rng) : 0.0;
    return {PredictiveDistribution(Gaussian{y1, std::max(s2, kMinSd)}), y1 + y2};
}

PodFarOutcome pod_far_target_experiment(const SyntheticSystem& system, double alpha,
                                        std::size_t cases_per_trial, std::size_t trials,
                                        std::uint64_t seed, double se_target, double pod_target,
                                        double far_limit) {
    system.validate();
    require(alpha > 0.0 && alpha < 1.0, "pod_far_target_experiment: alpha must lie in (0,1)");
    require(cases_per_trial >= 1, "pod_far_target_experiment: need at least one case per trial");
    require(trials > 0 || se_target > 0.0,
            "pod_far_target_experiment: adaptive mode needs a positive se_target");

    const auto run_trial = [&](std::size_t index) {
        auto rng = detail::substream(seed, index);
        const BinaryCounts c = simulate_counts(system, alpha, cases_per_trial, rng);
        if (c.hits + c.misses == 0 || c.hits + c.false_alarms == 0) return false;
        return pod(c) >= pod_target && far(c) <= far_limit;
    };

    std::size_t done = 0;
    std::size_t successes = 0;
    const bool adaptive = trials == 0;
    // p(1-p) <= 1/4, so the adaptive loop is guaranteed to stop by here
    const std::size_t cap =
        adaptive ? static_cast<std::size_t>(0.25 / (se_target * se_target)) + 1 : trials;
    constexpr std::size_t kMinTrials = 1000;
    constexpr std::size_t kBatch = 500;

    while (done < cap) {
        const std::size_t target = adaptive ? std::min(cap, done + kBatch) : cap;
        for (; done < target; ++done) successes += run_trial(done) ? 1 : 0;
        if (!adaptive) break;
        const double p = static_cast<double>(successes) / static_cast<double>(done);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(done));
        if (done >= kMinTrials && se < se_target) break;
    }

    PodFarOutcome out;
    out.trials = done;
    out.success_probability = static_cast<double>(successes) / static_cast<double>(done);
    out.standard_error = std::sqrt(out.success_probability * (1.0 - out.success_probability) /
                                   static_cast<double>(done));
    return out;
}

std::vector<AlphaBiasPoint> alpha_bias_experiment(const SyntheticSystem& system,
                                                  std::span<const double> alpha_grid,
                                                  std::size_t cases, std::uint64_t seed) {
    system.validate();
    require(!alpha_grid.empty(), "alpha_bias_experiment: empty alpha grid");
    require(cases >= 1, "alpha_bias_experiment: need at least one case");

    std::vector<AlphaBiasPoint> out;
    out.reserve(alpha_grid.size());
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        const double alpha = alpha_grid[i];
        require(alpha > 0.0 && alpha < 1.0, "alpha_bias_experiment: alphas must lie in (0,1)");
        auto rng = detail::substream(seed, i);
        const BinaryCounts c = simulate_counts(system, alpha, cases, rng);
        AlphaBiasPoint point;
        point.alpha = alpha;
        if (c.false_alarms + c.misses > 0) point.alpha_hat = estimate_alpha_naive(c);
        try {
            point.alpha_tilde = estimate_alpha_signal_detection(c);
        } catch (const UndefinedMeasureError&) {
            // degenerate table for this alpha; reported as a missing point
        }
        out.push_back(point);
    }
    return out;
}

EventWarnProbabilities miss_vs_warn_probability(const SyntheticSystem& system, double theta) {
    system.validate();
    require(system.sigma1() > 0.0,
            "miss_vs_warn_probability: sigma1 = 0 (climatology-only system)");
    EventWarnProbabilities out;
    out.p_event = 1.0 - norm_cdf((theta - system.mu) / system.sigma);
    out.p_warn = 1.0 - norm_cdf((theta - system.mu) / system.sigma1());
    return out;
}

void LeadTimePenalty::validate() const {
    require(entries[0][0] == 0.0 && entries[1][1] == 0.0,
            "LeadTimePenalty: agreeing decisions must cost zero");
    require(entries[0][1] >= 0.0 && entries[1][0] >= 0.0,
            "LeadTimePenalty: penalties must be nonnegative");
}

PairedForecastCase draw_paired_case(const SyntheticSystem& system, double early_rel_uncertainty,
                                    std::mt19937_64& rng) {
    system.validate();
    require(early_rel_uncertainty >= system.rel_uncertainty && early_rel_uncertainty <= 1.0,
            "draw_paired_case: the early system cannot be sharper than the standard one");
    const double s_early = early_rel_uncertainty * system.sigma;
    const double s_std = system.sigma2();
    const double s_shared = std::sqrt(std::max(0.0, system.sigma * system.sigma - s_early * s_early));
    const double s_gain = std::sqrt(std::max(0.0, s_early * s_early - s_std * s_std));

    std::normal_distribution<double> shared(system.mu, s_shared > 0.0 ? s_shared : 1.0);
    std::normal_distribution<double> gain(0.0, s_gain > 0.0 ? s_gain : 1.0);
    const double y_shared = s_shared > 0.0 ? shared(rng) : system.mu;
    const double y_gain = s_gain > 0.0 ? gain(rng) : 0.0;

    return {PredictiveDistribution(Gaussian{y_shared, std::max(s_early, kMinSd)}),
            PredictiveDistribution(Gaussian{y_shared + y_gain, std::max(s_std, kMinSd)})};
}

BetaSweepResult optimize_early_beta(std::span<const PairedForecastCase> cases, double alpha,
                                    double theta, const LeadTimePenalty& penalty,
                                    std::span<const double> beta_grid) {
    penalty.validate();
    require(alpha > 0.0 && alpha < 1.0, "optimize_early_beta: alpha must lie in (0,1)");
    require(!cases.empty(), "optimize_early_beta: empty case list");
    require(!beta_grid.empty(), "optimize_early_beta: empty beta grid");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        require(beta_grid[i] > 0.0 && beta_grid[i] < 1.0,
                "optimize_early_beta: betas must lie in (0,1)");
        if (i > 0) {
            require(beta_grid[i] > beta_grid[i - 1],
                    "optimize_early_beta: beta grid must be strictly increasing");
        }
    }

    // The early system warns at level beta iff its beta-quantile exceeds
    // theta, which for the lower generalized inverse is F_early(theta) < beta.
    std::vector<double> early_cdf_at_theta(cases.size());
    std::vector<bool> standard_warn(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        early_cdf_at_theta[i] = cases[i].early.cdf(theta);
        standard_warn[i] = cases[i].standard.quantile(alpha) > theta;
    }

    BetaSweepResult out;
    out.points.reserve(beta_grid.size());
    double best = std::numeric_limits<double>::infinity();
    for (double beta : beta_grid) {
        double score = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            score += penalty.at(early_cdf_at_theta[i] < beta, standard_warn[i]);
        }
        out.points.push_back({beta, score});
        if (score < best) { // ties resolve to the smaller beta
            best = score;
            out.best_beta = beta;
        }
    }
    return out;
}

double ks_statistic_uniform(std::vector<double> values) {
    require(!values.empty(), "ks_statistic_uniform: empty sample");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double u = values[i];
        require(u >= 0.0 && u <= 1.0, "ks_statistic_uniform: values must lie in [0,1]");
        d = std::max(d, std::max(u - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - u));
    }
    return d;
}

} // namespace firm
