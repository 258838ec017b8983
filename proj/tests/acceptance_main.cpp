// Acceptance suite: every release criterion checked end to end at its stated
// tolerance, one [PASS]/[FAIL] line per criterion. Exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "firm/distribution.hpp"
#include "firm/inference.hpp"
#include "firm/normal.hpp"
#include "firm/scoring.hpp"
#include "firm/synthetic.hpp"
#include "firm/verification.hpp"

using namespace firm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ContingencyTable ocf_table() {
    return ContingencyTable(3, {77984, 259, 37, 199, 136, 50, 6, 15, 27});
}

ContingencyTable official_table() {
    return ContingencyTable(3, {77658, 165, 13, 451, 171, 36, 80, 74, 65});
}

FirmSpec rainfall_spec() { return {{50.0, 100.0}, {1.0, 4.0}, 0.75, 0.0}; }

// --------------------------------------------------------------------------

std::string criterion_matrix() {
    const auto m = build_scoring_matrix(rainfall_spec());
    const double expected[3][3] = {{0.0, 0.75, 3.75}, {0.25, 0.0, 3.0}, {1.25, 1.0, 0.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            require(m.at(i, j) == expected[i][j],
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                        fmt(m.at(i, j), "%.17g") + ", expected " + fmt(expected[i][j], "%.17g"));
        }
    }
    return "all nine entries exact";
}

std::string criterion_table1() {
    const auto start = std::chrono::steady_clock::now();
    const auto matrix = build_scoring_matrix(rainfall_spec());
    const auto ocf = mean_score(ocf_table(), matrix);
    const auto official = mean_score(official_table(), matrix);
    const double elapsed = seconds_since(start);

    require(std::abs(ocf.miss - 6.14e-3) <= 0.05e-3,
            "OCF miss mean " + fmt(ocf.miss) + " not within 0.05e-3 of 6.14e-3");
    require(std::abs(official.miss - 3.56e-3) <= 0.05e-3,
            "Official miss mean " + fmt(official.miss) + " not within 0.05e-3 of 3.56e-3");

    const double ocf_pct = 100.0 * ocf.miss / ocf.total;
    const double official_pct = 100.0 * official.miss / official.total;
    require(std::abs(ocf_pct - 87.0) <= 1.0, "OCF miss share " + fmt(ocf_pct) + "% vs 87%");
    require(std::abs(official_pct - 49.0) <= 1.0,
            "Official miss share " + fmt(official_pct) + "% vs 49%");

    require(std::abs(ocf.total - 7.05e-3) <= 0.01e-3,
            "OCF total " + fmt(ocf.total) + " not within 0.01e-3 of 7.05e-3");
    require(std::abs(official.total - 7.21e-3) <= 0.01e-3,
            "Official total " + fmt(official.total) + " not within 0.01e-3 of 7.21e-3");

    require(elapsed < 1.0, "took " + fmt(elapsed) + "s, limit 1s");
    return "totals " + fmt(ocf.total) + "/" + fmt(official.total) + ", miss shares " +
           fmt(ocf_pct) + "%/" + fmt(official_pct) + "% in " + fmt(elapsed, "%.3f") + "s";
}

std::string criterion_alpha_tilde() {
    const double ocf = estimate_alpha_signal_detection(collapse_to_binary(ocf_table(), 0));
    const double official =
        estimate_alpha_signal_detection(collapse_to_binary(official_table(), 0));
    require(std::abs(ocf - 0.75) <= 0.01, "OCF alpha-tilde " + fmt(ocf) + " vs 0.75 +- 0.01");
    require(std::abs(official - 0.89) <= 0.01,
            "Official alpha-tilde " + fmt(official) + " vs 0.89 +- 0.01");
    return "alpha-tilde " + fmt(ocf) + " (OCF), " + fmt(official) + " (Official)";
}

std::string criterion_mixed_alpha() {
    const PredictiveDistribution f = Gaussian{1.0, 1.0};
    const std::vector<double> thetas{0.0, 2.0};
    const std::vector<double> alphas{0.1, 0.9};
    const std::vector<double> weights{1.0, 1.0};

    const double e0 = detail::expected_score_per_threshold_alpha(f, thetas, alphas, weights, -1.0);
    const double e1 = detail::expected_score_per_threshold_alpha(f, thetas, alphas, weights, 1.0);
    const double e2 = detail::expected_score_per_threshold_alpha(f, thetas, alphas, weights, 3.0);
    require(std::abs(e0 - 0.2270) <= 1e-3, "E[C0] = " + fmt(e0) + " vs 0.2270 +- 1e-3");
    require(std::abs(e1 - 0.2856) <= 1e-3, "E[C1] = " + fmt(e1) + " vs 0.2856 +- 1e-3");
    require(std::abs(e2 - 0.2270) <= 1e-3, "E[C2] = " + fmt(e2) + " vs 0.2270 +- 1e-3");
    require(e1 > e0 + 1e-6 && e1 > e2 + 1e-6, "the middle category must be strictly worse");

    const double p0 = f.cdf(0.0);
    const double p1 = f.cdf(2.0) - f.cdf(0.0);
    const double p2 = 1.0 - f.cdf(2.0);
    require(std::abs(p0 - 0.16) <= 0.005, "p0 = " + fmt(p0) + " vs 0.16 +- 0.005");
    require(std::abs(p1 - 0.68) <= 0.005, "p1 = " + fmt(p1) + " vs 0.68 +- 0.005");
    require(std::abs(p2 - 0.16) <= 0.005, "p2 = " + fmt(p2) + " vs 0.16 +- 0.005");
    return "expected scores (" + fmt(e0) + ", " + fmt(e1) + ", " + fmt(e2) + "), p (" + fmt(p0) +
           ", " + fmt(p1) + ", " + fmt(p2) + ")";
}

std::string criterion_consistency() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> n_thresholds(1, 4);
    std::uniform_real_distribution<double> threshold(-10.0, 10.0);
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    std::uniform_real_distribution<double> alpha_gen(0.02, 0.98);
    std::uniform_int_distribution<int> n_points(2, 8);
    std::uniform_real_distribution<double> value(-12.0, 12.0);
    std::uniform_int_distribution<int> count(1, 5);

    const int pairs = 1000;
    for (int trial = 0; trial < pairs; ++trial) {
        FirmSpec spec;
        const int n = n_thresholds(rng);
        spec.thresholds.resize(static_cast<std::size_t>(n));
        for (auto& t : spec.thresholds) t = threshold(rng);
        std::sort(spec.thresholds.begin(), spec.thresholds.end());
        for (std::size_t i = 1; i < spec.thresholds.size(); ++i) {
            if (spec.thresholds[i] - spec.thresholds[i - 1] < 1e-3) {
                spec.thresholds[i] = spec.thresholds[i - 1] + 1e-3;
            }
        }
        spec.weights.resize(static_cast<std::size_t>(n));
        for (auto& w : spec.weights) w = weight(rng);
        spec.alpha = alpha_gen(rng);

        const int points = n_points(rng);
        std::vector<double> values(static_cast<std::size_t>(points));
        for (auto& v : values) v = value(rng);
        std::sort(values.begin(), values.end());
        std::vector<int> counts(static_cast<std::size_t>(points));
        int total = 0;
        EmpiricalSample sample;
        for (std::size_t k = 0; k < values.size(); ++k) {
            counts[k] = count(rng);
            total += counts[k];
            for (int c = 0; c < counts[k]; ++c) sample.values.push_back(values[k]);
        }
        const PredictiveDistribution f(sample);

        const auto matrix = build_scoring_matrix(spec);
        std::vector<double> expected(spec.category_count(), 0.0);
        for (std::size_t j = 0; j < spec.category_count(); ++j) {
            for (std::size_t k = 0; k < values.size(); ++k) {
                expected[j] += static_cast<double>(counts[k]) / total *
                               matrix.at(j, static_cast<std::size_t>(spec.category_of(values[k])));
            }
        }
        const double best = *std::min_element(expected.begin(), expected.end());
        const int chosen = directive_category(f, spec);
        require(expected[static_cast<std::size_t>(chosen)] <= best + 1e-12,
                "violation at trial " + std::to_string(trial) + ": directive category " +
                    std::to_string(chosen) + " scores " +
                    fmt(expected[static_cast<std::size_t>(chosen)], "%.12g") + " > best " +
                    fmt(best, "%.12g"));
    }
    const double elapsed = seconds_since(start);
    require(elapsed < 30.0, "took " + fmt(elapsed) + "s, limit 30s");
    return std::to_string(pairs) + " random (F, spec) pairs, zero violations, " +
           fmt(elapsed, "%.2f") + "s";
}

std::string criterion_huber() {
    const auto start = std::chrono::steady_clock::now();

    // balance-equation residual at returned solutions
    std::vector<PredictiveDistribution> dists;
    dists.push_back(Gaussian{-1.0, 2.5});
    dists.push_back(PointMassPlusExponentialTail{0.7, 20.0, 0.0});
    dists.push_back(PointMassPlusExponentialTail{0.2, 3.0, -4.0});
    double worst_residual = 0.0;
    for (const auto& f : dists) {
        for (double alpha : {0.1, 0.35, 0.5, 0.75, 0.9}) {
            for (double a : {0.25, 1.0, 5.0, kInf}) {
                const double x = huber_quantile(f, {alpha, a});
                double above, below;
                if (std::isinf(a)) {
                    above = f.upper_partial(x);
                    below = f.lower_partial(x);
                } else {
                    below = f.cdf_integral(x - a, x);
                    above = a - f.cdf_integral(x, x + a);
                }
                const double rel = std::abs(alpha * above - (1.0 - alpha) * below) /
                                   std::max(alpha * above + (1.0 - alpha) * below, 1e-300);
                worst_residual = std::max(worst_residual, rel);
            }
        }
    }
    require(worst_residual < 1e-8,
            "worst relative residual " + fmt(worst_residual, "%.3e") + " >= 1e-8");

    // a -> 0 convergence to the quantile
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alpha_gen(0.05, 0.95);
    std::uniform_real_distribution<double> knot(-20.0, 20.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> vs(5);
        for (auto& v : vs) v = knot(rng);
        std::sort(vs.begin(), vs.end());
        for (std::size_t i = 1; i < vs.size(); ++i) {
            if (vs[i] - vs[i - 1] < 1e-2) vs[i] = vs[i - 1] + 1e-2;
        }
        PiecewiseLinearCdf cdf;
        const double probs[5] = {0.0, 0.3, 0.55, 0.8, 1.0};
        for (std::size_t i = 0; i < vs.size(); ++i) cdf.knots.push_back({vs[i], probs[i]});
        const PredictiveDistribution f(cdf);
        const double alpha = alpha_gen(rng);
        const double q = f.quantile(alpha);
        double prev = kInf;
        for (double a : {1.0, 0.1, 0.01, 0.001}) {
            const double d = std::abs(huber_quantile(f, {alpha, a}) - q);
            require(d <= prev + 1e-9, "distance to quantile not monotone in a");
            prev = d;
        }
        require(prev <= 1e-3, "final distance " + fmt(prev, "%.3e") + " above 1e-3 at a=0.001");
    }

    // a = inf: expectile; at alpha = 1/2 it is the mean
    for (const auto& f : dists) {
        const double m = huber_quantile(f, {0.5, kInf});
        require(std::abs(m - f.mean()) <= 1e-8 * std::max(1.0, std::abs(f.mean())),
                "H(1/2, inf) = " + fmt(m) + " differs from the mean " + fmt(f.mean()));
        require(std::abs(expectile(f, 0.5) - m) <= 1e-12, "expectile(1/2) != H(1/2, inf)");
    }

    // right-skewed distribution: tail-aware expectile above the quantile
    const PredictiveDistribution convective = PointMassPlusExponentialTail{0.7, 20.0, 0.0};
    const double q75 = convective.quantile(0.75);
    const double e75 = expectile(convective, 0.75);
    require(e75 > q75,
            "expectile " + fmt(e75) + " not above quantile " + fmt(q75) + " for skewed F");

    const double elapsed = seconds_since(start);
    require(elapsed < 10.0, "took " + fmt(elapsed) + "s, limit 10s");
    return "worst residual " + fmt(worst_residual, "%.2e") + ", expectile " + fmt(e75) +
           " > quantile " + fmt(q75) + ", " + fmt(elapsed, "%.2f") + "s";
}

std::string criterion_gerrity() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::uint64_t> cell(0, 60);

    int checked = 0;
    double worst = 0.0;
    while (checked < 200) {
        ContingencyTable t(2);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) t.add(i, j, cell(rng));
        }
        if (t.column_total(0) == 0 || t.column_total(1) == 0) continue;
        const double diff =
            std::abs(gerrity_score(t) - peirce_skill_score(collapse_to_binary(t, 0)));
        worst = std::max(worst, diff);
        require(diff < 1e-12, "2-category mismatch " + fmt(diff, "%.3e") + " at table " +
                                  std::to_string(checked));
        ++checked;
    }

    std::uniform_real_distribution<double> u(0.02, 1.0);
    int decided = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        double p0 = u(rng), p1 = u(rng), p2 = u(rng);
        const double ps = p0 + p1 + p2;
        p0 /= ps; p1 /= ps; p2 /= ps;
        double r0 = u(rng), r1 = u(rng), r2 = u(rng);
        const double rs = r0 + r1 + r2;
        r0 /= rs; r1 /= rs; r2 /= rs;
        const auto g = gerrity_matrix(std::vector<double>{r0, r1, r2});
        const auto reward = [&](std::size_t i) {
            return p0 * g[i][0] + p1 * g[i][1] + p2 * g[i][2];
        };
        const double others = std::max(reward(0), reward(1));
        if (std::abs(reward(2) - others) <= 1e-9) continue; // knife-edge tie
        ++decided;
        require(gerrity_prefers_top_category(p0, p1, p2, r0, r1, r2) == (reward(2) > others),
                "rule disagrees with brute force at draw " + std::to_string(trial));
    }
    return "200 tables, worst |G-P| = " + fmt(worst, "%.2e") + "; rule agreed on " +
           std::to_string(decided) + "/1000 non-tied draws";
}

std::string criterion_inference_coverage() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t reps = 1500;
    const std::size_t n = 731;
    const double rho = 0.34;

    std::size_t dm_covered = 0;
    std::size_t boot_covered = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        std::mt19937_64 rng(817000 + r);
        std::normal_distribution<double> noise(0.0, 1.0);
        ScoreSeries series;
        series.periods.reserve(n);
        series.values.reserve(n);
        double x = noise(rng) / std::sqrt(1.0 - rho * rho);
        for (std::size_t t = 0; t < n; ++t) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "p%06zu", t);
            series.periods.emplace_back(buf);
            series.values.push_back(x);
            x = rho * x + noise(rng);
        }

        const auto dm = diebold_mariano_ci(series, 2, 0.95);
        if (dm.lower <= 0.0 && 0.0 <= dm.upper) ++dm_covered;

        const auto boot = circular_block_bootstrap_ci(series, 27, 27000, 0.95, 900 + r);
        if (boot.lower <= 0.0 && 0.0 <= boot.upper) ++boot_covered;
    }

    const double dm_cov = static_cast<double>(dm_covered) / static_cast<double>(reps);
    const double boot_cov = static_cast<double>(boot_covered) / static_cast<double>(reps);
    const double elapsed = seconds_since(start);

    require(dm_cov >= 0.91 && dm_cov <= 0.975,
            "modified-DM coverage " + fmt(dm_cov) + " outside [0.91, 0.975]");
    require(boot_cov >= 0.91 && boot_cov <= 0.975,
            "block-bootstrap coverage " + fmt(boot_cov) + " outside [0.91, 0.975]");
    require(elapsed < 300.0, "took " + fmt(elapsed) + "s, limit 300s");
    return "coverage DM " + fmt(dm_cov) + ", bootstrap " + fmt(boot_cov) + " over " +
           std::to_string(reps) + " repetitions, " + fmt(elapsed, "%.1f") + "s";
}

std::string criterion_synthetic() {
    // PIT uniformity at one million draws
    std::mt19937_64 rng(51);
    const SyntheticSystem system{0.0, 1.0, 0.5, 0.05};
    const std::size_t n = 1000000;
    std::vector<double> pit(n);
    for (auto& p : pit) {
        const auto c = draw_case(system, rng);
        p = c.predictive.cdf(c.observation);
    }
    const double ks = ks_statistic_uniform(std::move(pit));
    require(ks < 0.002, "PIT KS statistic " + fmt(ks, "%.4e") + " >= 0.002");

    // adaptive trial counts keep the binomial standard error below 0.008
    double worst_se = 0.0;
    for (const double alpha : {0.3, 0.6, 0.9}) {
        const SyntheticSystem s{0.0, 1.0, 0.25, 0.05};
        const auto outcome = pod_far_target_experiment(s, alpha, 365, 0, 77);
        worst_se = std::max(worst_se, outcome.standard_error);
        require(outcome.standard_error < 0.008,
                "standard error " + fmt(outcome.standard_error) + " at alpha " + fmt(alpha));
    }

    // estimator bias at one million cases: the signal-detection estimate
    // stays closer to the identity than the naive ratio
    const SyntheticSystem blunt{0.0, 1.0, 0.5, 0.01};
    const std::vector<double> grid{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    const auto points = alpha_bias_experiment(blunt, grid, 1000000, 123);
    double hat_err = 0.0, tilde_err = 0.0;
    for (const auto& point : points) {
        require(point.alpha_hat.has_value() && point.alpha_tilde.has_value(),
                "estimator undefined at alpha " + fmt(point.alpha));
        hat_err += std::abs(*point.alpha_hat - point.alpha);
        tilde_err += std::abs(*point.alpha_tilde - point.alpha);
    }
    hat_err /= static_cast<double>(points.size());
    tilde_err /= static_cast<double>(points.size());
    require(tilde_err < hat_err,
            "alpha-tilde mean error " + fmt(tilde_err) + " not below alpha-hat " + fmt(hat_err));

    return "PIT KS " + fmt(ks, "%.2e") + ", worst SE " + fmt(worst_se, "%.4f") +
           ", mean |error| tilde " + fmt(tilde_err, "%.3f") + " vs hat " + fmt(hat_err, "%.3f");
}

std::string criterion_leadtime() {
    const double alpha = 0.75;
    const SyntheticSystem system{0.0, 1.0, 0.25, 0.1};

    // coincident decisions cost nothing
    std::mt19937_64 rng(4);
    std::vector<PairedForecastCase> identical;
    for (int i = 0; i < 5000; ++i) identical.push_back(draw_paired_case(system, 0.25, rng));
    LeadTimePenalty penalty; // [[0,1],[15,0]]
    const std::vector<double> at_alpha{alpha};
    const auto zero =
        optimize_early_beta(identical, alpha, system.theta1(), penalty, at_alpha);
    require(zero.points[0].score == 0.0,
            "coincident decisions scored " + fmt(zero.points[0].score) + ", expected 0");

    // a noisier early system facing a 15:1 retraction penalty must demand
    // higher confidence:  1 - beta* strictly above 1 - alpha
    std::vector<PairedForecastCase> cases;
    for (int i = 0; i < 40000; ++i) cases.push_back(draw_paired_case(system, 0.5, rng));
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    const auto result = optimize_early_beta(cases, alpha, system.theta1(), penalty, grid);

    const double early_threshold = 1.0 - result.best_beta;
    const double standard_threshold = 1.0 - alpha;
    require(early_threshold > standard_threshold + 1e-9,
            "early warning threshold probability " + fmt(early_threshold) +
                " does not exceed the standard " + fmt(standard_threshold));
    require(result.best_beta < alpha, "best beta " + fmt(result.best_beta) +
                                          " not below alpha " + fmt(alpha) +
                                          " (quantile-level parameterisation)");
    return "best beta " + fmt(result.best_beta) + " (threshold probability " +
           fmt(early_threshold) + ") vs standard alpha " + fmt(alpha) +
           " (threshold probability " + fmt(standard_threshold) + "); S = 0 on coincidence";
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<std::string()> body;
    };
    const std::vector<Criterion> criteria{
        {1, "scoring matrix reproduction", criterion_matrix},
        {2, "contingency-table scoring means", criterion_table1},
        {3, "signal-detection risk estimates", criterion_alpha_tilde},
        {4, "per-threshold risk counterexample", criterion_mixed_alpha},
        {5, "directive consistency oracle", criterion_consistency},
        {6, "huber functional suite", criterion_huber},
        {7, "gerrity/peirce identity and top-category rule", criterion_gerrity},
        {8, "inference coverage on AR(1) differentials", criterion_inference_coverage},
        {9, "synthetic calibration and estimator bias", criterion_synthetic},
        {10, "lead-time penalty optimisation", criterion_leadtime},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            const std::string detail = criterion.body();
            std::cout << "[PASS] criterion " << criterion.id << ": " << criterion.name << " ("
                      << detail << ")\n";
        } catch (const Failure& f) {
            ++failures;
            std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name << " - "
                      << f.what << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name
                      << " - unexpected error: " << e.what() << "\n";
        }
        std::cout.flush();
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
