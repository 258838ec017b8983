#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "firm/distribution.hpp"

namespace firm {

/// A FIRM service specification: category thresholds theta_1..theta_N,
/// per-threshold weights w_1..w_N, the risk parameter alpha (the cost of a
/// miss relative to a false alarm is alpha : 1-alpha) and the discounting
/// distance a.
///
/// Categories are right-closed: a value y belongs to C_0 if y <= theta_1,
/// to C_i if theta_i < y <= theta_{i+1}, and to C_N if y > theta_N. A value
/// exactly on a threshold therefore falls in the lower category, and so does
/// a quantile that lands exactly on a threshold.
struct FirmSpec {
    std::vector<double> thresholds;
    std::vector<double> weights;
    double alpha = 0.5;
    double a = 0.0;

    void validate() const;
    std::size_t threshold_count() const { return thresholds.size(); }
    std::size_t category_count() const { return thresholds.size() + 1; }

    /// Category index of a real value under the right-closed convention.
    int category_of(double value) const;
};

/// Penalty matrix s_ij for forecast category i and observed category j.
/// Zero on the diagonal; entries above it are miss penalties and entries
/// below are false-alarm penalties, growing strictly away from the diagonal.
class ScoringMatrix {
public:
    ScoringMatrix(std::size_t category_count, std::vector<double> entries);

    std::size_t category_count() const { return n_; }
    double at(std::size_t forecast, std::size_t observed) const;

private:
    std::size_t n_;
    std::vector<double> entries_; // row-major (forecast, observed)
};

/// The matrix form of a FIRM score, defined only for a = 0:
///   s_ij = alpha * sum of weights between the categories for misses (i<j),
///   s_ij = (1-alpha) * the same sum for false alarms (i>j).
ScoringMatrix build_scoring_matrix(const FirmSpec& spec);

/// Elementary quantile score S^Q_{theta,alpha}(x, y):
/// 1-alpha for a false alarm (y <= theta < x), alpha for a miss
/// (x <= theta < y), 0 otherwise.
double elementary_quantile_score(double theta, double alpha, double x, double y);

/// Elementary Huber score S^H_{theta,alpha,a}(x, y) for a > 0:
/// (1-alpha)*min(theta - y, a) for false alarms, alpha*min(y - theta, a)
/// for misses, 0 otherwise. Depends on x only through its side of theta.
double elementary_huber_score(double theta, HuberParams params, double x, double y);

/// One scored forecast case split into its miss and false-alarm parts.
/// total == miss + false_alarm always; each threshold contributes to at most
/// one part.
struct ScoreBreakdown {
    double total = 0.0;
    double miss = 0.0;
    double false_alarm = 0.0;
};

/// Score a forecast category against a real-valued observation. Works for
/// any a >= 0 (including +inf); for a = 0 this agrees exactly with the
/// scoring-matrix lookup for the observation's category.
ScoreBreakdown score_case(const FirmSpec& spec, int forecast_category, double observation);

/// Score a forecast category against an observed category. Only valid for
/// a = 0; with a > 0 the penalty depends on the real-valued observation and
/// this throws std::invalid_argument.
ScoreBreakdown score_case_categorical(const FirmSpec& spec, int forecast_category,
                                      int observed_category);

/// Convenience overload mapping a real-valued point forecast to its category.
ScoreBreakdown score_case(const FirmSpec& spec, double point_forecast, double observation);

/// The consistent forecast directive: the category containing the Huber
/// quantile H^alpha_a(F) (the alpha-quantile when a = 0, the alpha-expectile
/// when a = +inf).
int directive_category(const PredictiveDistribution& f, const FirmSpec& spec);

/// Scoring matrix for categorical forecasts of event likelihood
/// (dichotomous outcome): rows are forecast categories delimited by
/// probability thresholds theta_1..theta_N, columns are the observed
/// nonevent / event.
class BinaryLikelihoodMatrix {
public:
    BinaryLikelihoodMatrix(std::vector<double> nonevent_column, std::vector<double> event_column);

    std::size_t category_count() const { return nonevent_.size(); }

    /// Penalty when category `forecast` was issued; `event` is the outcome.
    double at(std::size_t forecast, bool event) const;

private:
    std::vector<double> nonevent_;
    std::vector<double> event_;
};

/// Build the likelihood-category scoring matrix: forecasting C_i costs
/// sum_{k<=i} w_k*theta_k on a nonevent and sum_{k>i} w_k*(1-theta_k) on an
/// event. Thresholds are probabilities in (0,1), strictly increasing.
BinaryLikelihoodMatrix build_binary_likelihood_matrix(std::span<const double> thresholds,
                                                      std::span<const double> weights);

/// Closed-form expectation of the elementary quantile score when Y ~ F:
/// (1-alpha)*F(theta) if x > theta, alpha*(1-F(theta)) if x <= theta.
double expected_elementary_quantile_score(const PredictiveDistribution& f, double theta,
                                          double alpha, double x);

namespace detail {

/// Expected total quantile score of a point forecast x when a separate risk
/// parameter is attached to each threshold. Kept out of the public surface:
/// mixing risk parameters breaks the single-directive structure (adjacent
/// categories may both beat the one between them), which is exactly what
/// this hook exists to demonstrate.
double expected_score_per_threshold_alpha(const PredictiveDistribution& f,
                                          std::span<const double> thresholds,
                                          std::span<const double> alphas,
                                          std::span<const double> weights, double x);

} // namespace detail

} // namespace firm
