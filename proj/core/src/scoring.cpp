#include "firm/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace firm {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_category(const FirmSpec& spec, int category, const char* role) {
    if (category < 0 || static_cast<std::size_t>(category) >= spec.category_count()) {
        throw std::invalid_argument(std::string(role) + " category " + std::to_string(category) +
                                    " out of range 0.." +
                                    std::to_string(spec.category_count() - 1));
    }
}

} // namespace

void FirmSpec::validate() const {
    require(!thresholds.empty(), "FirmSpec: at least one threshold required");
    require(weights.size() == thresholds.size(),
            "FirmSpec: weights and thresholds must have the same length");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        require(std::isfinite(thresholds[i]), "FirmSpec: thresholds must be finite");
        if (i > 0) {
            require(thresholds[i] > thresholds[i - 1],
                    "FirmSpec: thresholds must be strictly increasing");
        }
        require(weights[i] > 0.0 && std::isfinite(weights[i]),
                "FirmSpec: weights must be strictly positive");
    }
    require(alpha > 0.0 && alpha < 1.0, "FirmSpec: alpha must lie strictly in (0,1)");
    require(a >= 0.0 && !std::isnan(a), "FirmSpec: a must be nonnegative (+inf allowed)");
}

int FirmSpec::category_of(double value) const {
    // number of thresholds strictly below the value
    const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), value);
    return static_cast<int>(it - thresholds.begin());
}

ScoringMatrix::ScoringMatrix(std::size_t category_count, std::vector<double> entries)
    : n_(category_count), entries_(std::move(entries)) {
    require(n_ >= 2, "ScoringMatrix: at least two categories required");
    require(entries_.size() == n_ * n_, "ScoringMatrix: entry count must be category_count^2");
    const auto s = [&](std::size_t i, std::size_t j) { return entries_[i * n_ + j]; };
    for (std::size_t i = 0; i < n_; ++i) {
        require(s(i, i) == 0.0, "ScoringMatrix: diagonal must be zero");
        for (std::size_t j = 0; j < n_; ++j) {
            require(s(i, j) >= 0.0, "ScoringMatrix: entries must be nonnegative");
            // strictly increasing away from the diagonal, along rows and columns
            const bool row_ok = (j <= i + 1 || s(i, j) > s(i, j - 1)) &&
                                (j + 1 >= i || s(i, j) > s(i, j + 1));
            const bool col_ok = (i <= j + 1 || s(i, j) > s(i - 1, j)) &&
                                (i + 1 >= j || s(i, j) > s(i + 1, j));
            require(row_ok && col_ok,
                    "ScoringMatrix: penalties must grow strictly away from the diagonal");
        }
    }
}

double ScoringMatrix::at(std::size_t forecast, std::size_t observed) const {
    require(forecast < n_ && observed < n_, "ScoringMatrix: index out of range");
    return entries_[forecast * n_ + observed];
}

ScoringMatrix build_scoring_matrix(const FirmSpec& spec) {
    spec.validate();
    require(spec.a == 0.0,
            "build_scoring_matrix: matrix form exists only for a = 0; "
            "with a > 0 score against real-valued observations instead");

    // prefix[k] = w_1 + ... + w_k
    std::vector<double> prefix(spec.weights.size() + 1, 0.0);
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
        prefix[k + 1] = prefix[k] + spec.weights[k];
    }

    const std::size_t n = spec.category_count();
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i < j) {
                entries[i * n + j] = spec.alpha * (prefix[j] - prefix[i]);
            } else if (i > j) {
                entries[i * n + j] = (1.0 - spec.alpha) * (prefix[i] - prefix[j]);
            }
        }
    }
    return ScoringMatrix(n, std::move(entries));
}

double elementary_quantile_score(double theta, double alpha, double x, double y) {
    require(alpha > 0.0 && alpha < 1.0, "elementary_quantile_score: alpha must lie in (0,1)");
    if (y <= theta && theta < x) return 1.0 - alpha; // false alarm
    if (x <= theta && theta < y) return alpha;       // miss
    return 0.0;
}

double elementary_huber_score(double theta, HuberParams params, double x, double y) {
    params.validate();
    require(params.a > 0.0, "elementary_huber_score: requires a > 0; use "
                            "elementary_quantile_score for the a = 0 case");
    if (y <= theta && theta < x) return (1.0 - params.alpha) * std::min(theta - y, params.a);
    if (x <= theta && theta < y) return params.alpha * std::min(y - theta, params.a);
    return 0.0;
}

namespace {

// Shared kernel: sides of each threshold are booleans, the observation
// enters the penalty only when a > 0.
ScoreBreakdown score_sides(const FirmSpec& spec, int forecast_category, double observation,
                           bool observation_is_category, int observed_category) {
    ScoreBreakdown out;
    for (std::size_t k = 0; k < spec.thresholds.size(); ++k) {
        const double theta = spec.thresholds[k];
        const bool forecast_below = forecast_category <= static_cast<int>(k);
        const bool observed_below = observation_is_category
                                        ? observed_category <= static_cast<int>(k)
                                        : observation <= theta;
        if (forecast_below == observed_below) continue;
        double penalty;
        if (spec.a == 0.0) {
            penalty = spec.weights[k] * (observed_below ? 1.0 - spec.alpha : spec.alpha);
        } else {
            const double dist = observed_below ? theta - observation : observation - theta;
            penalty = spec.weights[k] * (observed_below ? 1.0 - spec.alpha : spec.alpha) *
                      std::min(dist, spec.a);
        }
        if (observed_below) {
            out.false_alarm += penalty;
        } else {
            out.miss += penalty;
        }
    }
    out.total = out.miss + out.false_alarm;
    return out;
}

} // namespace

ScoreBreakdown score_case(const FirmSpec& spec, int forecast_category, double observation) {
    spec.validate();
    check_category(spec, forecast_category, "forecast");
    require(std::isfinite(observation), "score_case: observation must be finite");
    return score_sides(spec, forecast_category, observation, false, 0);
}

ScoreBreakdown score_case_categorical(const FirmSpec& spec, int forecast_category,
                                      int observed_category) {
    spec.validate();
    check_category(spec, forecast_category, "forecast");
    check_category(spec, observed_category, "observed");
    require(spec.a == 0.0,
            "score_case_categorical: a > 0 scores depend on the real-valued observation; "
            "a categorical observation is only sufficient when a = 0");
    return score_sides(spec, forecast_category, 0.0, true, observed_category);
}

ScoreBreakdown score_case(const FirmSpec& spec, double point_forecast, double observation) {
    spec.validate();
    return score_case(spec, spec.category_of(point_forecast), observation);
}

int directive_category(const PredictiveDistribution& f, const FirmSpec& spec) {
    spec.validate();
    return spec.category_of(huber_quantile(f, HuberParams{spec.alpha, spec.a}));
}

BinaryLikelihoodMatrix::BinaryLikelihoodMatrix(std::vector<double> nonevent_column,
                                               std::vector<double> event_column)
    : nonevent_(std::move(nonevent_column)), event_(std::move(event_column)) {
    require(nonevent_.size() == event_.size() && nonevent_.size() >= 2,
            "BinaryLikelihoodMatrix: need matching columns with at least two rows");
}

double BinaryLikelihoodMatrix::at(std::size_t forecast, bool event) const {
    require(forecast < nonevent_.size(), "BinaryLikelihoodMatrix: row out of range");
    return event ? event_[forecast] : nonevent_[forecast];
}

BinaryLikelihoodMatrix build_binary_likelihood_matrix(std::span<const double> thresholds,
                                                      std::span<const double> weights) {
    require(!thresholds.empty() && thresholds.size() == weights.size(),
            "build_binary_likelihood_matrix: need matching nonempty thresholds and weights");
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        require(thresholds[k] > 0.0 && thresholds[k] < 1.0,
                "build_binary_likelihood_matrix: thresholds are probabilities in (0,1)");
        if (k > 0) {
            require(thresholds[k] > thresholds[k - 1],
                    "build_binary_likelihood_matrix: thresholds must be strictly increasing");
        }
        require(weights[k] > 0.0, "build_binary_likelihood_matrix: weights must be positive");
    }

    const std::size_t rows = thresholds.size() + 1;
    std::vector<double> nonevent(rows, 0.0);
    std::vector<double> event(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            if (k < i) {
                nonevent[i] += weights[k] * thresholds[k]; // false alarm at theta_k
            } else {
                event[i] += weights[k] * (1.0 - thresholds[k]); // miss at theta_k
            }
        }
    }
    return BinaryLikelihoodMatrix(std::move(nonevent), std::move(event));
}

double expected_elementary_quantile_score(const PredictiveDistribution& f, double theta,
                                          double alpha, double x) {
    require(alpha > 0.0 && alpha < 1.0,
            "expected_elementary_quantile_score: alpha must lie in (0,1)");
    return x > theta ? (1.0 - alpha) * f.cdf(theta) : alpha * (1.0 - f.cdf(theta));
}

namespace detail {

double expected_score_per_threshold_alpha(const PredictiveDistribution& f,
                                          std::span<const double> thresholds,
                                          std::span<const double> alphas,
                                          std::span<const double> weights, double x) {
    require(thresholds.size() == alphas.size() && thresholds.size() == weights.size(),
            "expected_score_per_threshold_alpha: mismatched lengths");
    double acc = 0.0;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        acc += weights[k] * expected_elementary_quantile_score(f, thresholds[k], alphas[k], x);
    }
    return acc;
}

} // namespace detail

} // namespace firm
