#include "firm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "firm/detail/rng.hpp"
#include "firm/errors.hpp"

namespace firm {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double t_quantile(double p, double df) {
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

double t_cdf(double x, double df) {
    return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

// 1/n-normalised sample autocovariance at the given lag
double autocovariance(const std::vector<double>& v, std::size_t lag, double mean) {
    double acc = 0.0;
    for (std::size_t t = lag; t < v.size(); ++t) acc += (v[t] - mean) * (v[t - lag] - mean);
    return acc / static_cast<double>(v.size());
}

std::optional<std::string> zero_inflation_warning(const ScoreSeries& s) {
    if (zero_fraction(s) > 0.9) {
        return "more than 90% of the differentials are exactly zero; "
               "interval estimates may converge slowly";
    }
    return std::nullopt;
}

// Type-7 (linear interpolation) quantile of an already sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct DmEstimate {
    double mean;
    double se;      // sqrt(V-hat), before the Harvey correction
    double kappa;   // Harvey/Leybourne/Newbold factor
    double df;
};

DmEstimate dm_estimate(const ScoreSeries& diff, int horizon) {
    diff.validate();
    require(horizon >= 1, "diebold_mariano: horizon must be at least 1");
    const auto n = diff.size();
    require(n > static_cast<std::size_t>(horizon),
            "diebold_mariano: series length must exceed the horizon");

    const double mean = mean_of(diff.values);
    double long_run = autocovariance(diff.values, 0, mean);
    for (int k = 1; k < horizon; ++k) {
        long_run += 2.0 * autocovariance(diff.values, static_cast<std::size_t>(k), mean);
    }
    const double variance_of_mean = long_run / static_cast<double>(n);
    if (!(variance_of_mean > 0.0)) {
        throw Error("diebold_mariano: truncated long-run variance estimate is not positive; "
                    "use the circular block bootstrap instead");
    }
    const double nn = static_cast<double>(n);
    const double h = static_cast<double>(horizon);
    const double kappa = std::sqrt((nn + 1.0 - 2.0 * h + h * (h - 1.0) / nn) / nn);
    return {mean, std::sqrt(variance_of_mean), kappa, nn - 1.0};
}

std::vector<double> bootstrap_replicate_means(const ScoreSeries& diff, std::size_t block_length,
                                              std::size_t replicates, std::uint64_t seed) {
    diff.validate();
    const std::size_t n = diff.size();
    require(block_length >= 1 && block_length <= n,
            "block bootstrap: block length must lie in [1, n]");
    require(replicates >= 100, "block bootstrap: at least 100 replicates required");

    // prefix sums over the doubled series make every circular block sum O(1)
    std::vector<double> prefix(2 * n + 1, 0.0);
    for (std::size_t i = 0; i < 2 * n; ++i) prefix[i + 1] = prefix[i] + diff.values[i % n];
    const auto block_sum = [&](std::size_t start, std::size_t len) {
        return prefix[start + len] - prefix[start];
    };

    const std::size_t blocks = (n + block_length - 1) / block_length;
    const std::size_t tail_len = n - (blocks - 1) * block_length;

    std::vector<double> means(replicates);
    for (std::size_t b = 0; b < replicates; ++b) {
        auto rng = detail::substream(seed, b);
        std::uniform_int_distribution<std::size_t> start(0, n - 1);
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < blocks; ++k) acc += block_sum(start(rng), block_length);
        acc += block_sum(start(rng), tail_len);
        means[b] = acc / static_cast<double>(n);
    }
    return means;
}

} // namespace

void ScoreSeries::validate() const {
    require(periods.size() == values.size(),
            "ScoreSeries: periods and values must have the same length");
    require(values.size() >= 2, "ScoreSeries: at least two periods required for inference");
    for (std::size_t i = 1; i < periods.size(); ++i) {
        require(periods[i] > periods[i - 1], "ScoreSeries: periods must be strictly increasing");
    }
}

std::string ci_method_name(CiMethod method) {
    switch (method) {
        case CiMethod::student_t: return "student-t";
        case CiMethod::diebold_mariano: return "diebold-mariano";
        case CiMethod::block_bootstrap: return "block-bootstrap";
    }
    return "unknown";
}

ScoreSeries difference_series(const ScoreSeries& a, const ScoreSeries& b) {
    if (a.periods.size() != b.periods.size()) {
        throw std::invalid_argument("difference_series: series have " +
                                    std::to_string(a.periods.size()) + " and " +
                                    std::to_string(b.periods.size()) + " periods");
    }
    for (std::size_t i = 0; i < a.periods.size(); ++i) {
        if (a.periods[i] != b.periods[i]) {
            throw std::invalid_argument("difference_series: period mismatch at index " +
                                        std::to_string(i) + ": '" + a.periods[i] + "' vs '" +
                                        b.periods[i] + "'");
        }
    }
    ScoreSeries out;
    out.periods = a.periods;
    out.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
    return out;
}

double lag1_correlation(const ScoreSeries& s) {
    require(s.size() >= 3, "lag1_correlation: at least three values required");
    const std::size_t m = s.size() - 1; // number of (x_t, x_{t+1}) pairs
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        mean_x += s.values[t];
        mean_y += s.values[t + 1];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double dx = s.values[t] - mean_x;
        const double dy = s.values[t + 1] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedMeasureError("lag1_correlation: zero variance in a lagged subseries");
    }
    return sxy / std::sqrt(sxx * syy);
}

CiResult student_t_ci(const ScoreSeries& diff, double level) {
    diff.validate();
    require(level > 0.0 && level < 1.0, "student_t_ci: level must lie in (0,1)");
    const auto n = static_cast<double>(diff.size());
    const double mean = mean_of(diff.values);
    double ss = 0.0;
    for (double v : diff.values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    CiResult out;
    out.level = level;
    out.method = ci_method_name(CiMethod::student_t);
    out.warning = zero_inflation_warning(diff);
    if (sd == 0.0) {
        out.lower = out.upper = mean; // degenerate interval, width 0
        return out;
    }
    const double se = sd / std::sqrt(n);
    const double half = t_quantile(0.5 * (1.0 + level), n - 1.0) * se;
    out.lower = mean - half;
    out.upper = mean + half;
    out.statistic = mean / se;
    return out;
}

CiResult diebold_mariano_ci(const ScoreSeries& diff, int horizon, double level) {
    require(level > 0.0 && level < 1.0, "diebold_mariano_ci: level must lie in (0,1)");
    const DmEstimate est = dm_estimate(diff, horizon);
    const double half = t_quantile(0.5 * (1.0 + level), est.df) * est.se / est.kappa;
    CiResult out;
    out.level = level;
    out.method = ci_method_name(CiMethod::diebold_mariano);
    out.lower = est.mean - half;
    out.upper = est.mean + half;
    out.statistic = est.kappa * est.mean / est.se;
    out.warning = zero_inflation_warning(diff);
    return out;
}

CiResult circular_block_bootstrap_ci(const ScoreSeries& diff, std::size_t block_length,
                                     std::size_t replicates, double level, std::uint64_t seed) {
    require(level > 0.0 && level < 1.0, "circular_block_bootstrap_ci: level must lie in (0,1)");
    auto means = bootstrap_replicate_means(diff, block_length, replicates, seed);
    std::sort(means.begin(), means.end());
    CiResult out;
    out.level = level;
    out.method = ci_method_name(CiMethod::block_bootstrap);
    out.lower = sorted_quantile(means, 0.5 * (1.0 - level));
    out.upper = sorted_quantile(means, 0.5 * (1.0 + level));
    out.statistic = mean_of(diff.values);
    out.warning = zero_inflation_warning(diff);
    return out;
}

CiResult compute_ci(const ScoreSeries& diff, CiMethod method, double level,
                    const InferenceOptions& options) {
    switch (method) {
        case CiMethod::student_t: return student_t_ci(diff, level);
        case CiMethod::diebold_mariano: return diebold_mariano_ci(diff, options.horizon, level);
        case CiMethod::block_bootstrap: {
            const std::size_t block =
                options.block_length > 0
                    ? options.block_length
                    : static_cast<std::size_t>(
                          std::lround(std::sqrt(static_cast<double>(diff.size()))));
            return circular_block_bootstrap_ci(diff, block, options.replicates, level,
                                               options.seed);
        }
    }
    throw std::invalid_argument("compute_ci: unknown method");
}

TestResult one_sided_test(const ScoreSeries& diff, CiMethod method, double level,
                          Alternative alternative, const InferenceOptions& options) {
    require(level > 0.0 && level < 1.0, "one_sided_test: level must lie in (0,1)");
    TestResult out;
    out.level = level;
    out.method = ci_method_name(method);
    const bool greater = alternative == Alternative::greater;

    if (method == CiMethod::block_bootstrap) {
        const std::size_t block =
            options.block_length > 0
                ? options.block_length
                : static_cast<std::size_t>(
                      std::lround(std::sqrt(static_cast<double>(diff.size()))));
        auto means = bootstrap_replicate_means(diff, block, options.replicates, options.seed);
        std::sort(means.begin(), means.end());
        out.bound = sorted_quantile(means, greater ? 1.0 - level : level);
        out.reject = greater ? out.bound > 0.0 : out.bound < 0.0;
        std::size_t against = 0;
        for (double m : means) {
            if (greater ? m <= 0.0 : m >= 0.0) ++against;
        }
        out.p_value = static_cast<double>(against + 1) / static_cast<double>(means.size() + 1);
        return out;
    }

    diff.validate();
    const auto n = static_cast<double>(diff.size());
    double mean, se, df = n - 1.0;
    if (method == CiMethod::diebold_mariano) {
        // the corrected statistic kappa*mean/sqrt(V) equals mean/se below
        const DmEstimate est = dm_estimate(diff, options.horizon);
        mean = est.mean;
        se = est.se / est.kappa;
        df = est.df;
    } else {
        mean = mean_of(diff.values);
        double ss = 0.0;
        for (double v : diff.values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (sd == 0.0) { // degenerate: every value equals the mean
            out.bound = mean;
            out.reject = greater ? mean > 0.0 : mean < 0.0;
            out.p_value = out.reject ? 0.0 : 1.0;
            return out;
        }
        se = sd / std::sqrt(n);
    }
    const double tq = t_quantile(level, df);
    const double stat = mean / se;
    if (greater) {
        out.bound = mean - tq * se;
        out.reject = out.bound > 0.0;
        out.p_value = 1.0 - t_cdf(stat, df);
    } else {
        out.bound = mean + tq * se;
        out.reject = out.bound < 0.0;
        out.p_value = t_cdf(stat, df);
    }
    return out;
}

double zero_fraction(const ScoreSeries& s) {
    if (s.values.empty()) return 0.0;
    std::size_t zeros = 0;
    for (double v : s.values) {
        if (v == 0.0) ++zeros;
    }
    return static_cast<double>(zeros) / static_cast<double>(s.values.size());
}

} // namespace firm
