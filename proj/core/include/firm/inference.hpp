#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace firm {

/// Per-period mean scores of one forecast system (or the difference of two).
/// Period keys are opaque strings whose lexicographic order must be strictly
/// increasing (ISO-8601 dates satisfy this).
struct ScoreSeries {
    std::vector<std::string> periods;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    void validate() const;
};

struct CiResult {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    std::string method;
    std::optional<double> statistic;
    std::optional<std::string> warning;
};

enum class CiMethod { student_t, diebold_mariano, block_bootstrap };

std::string ci_method_name(CiMethod method);

struct InferenceOptions {
    int horizon = 1;               // Diebold-Mariano forecast horizon
    std::size_t block_length = 0;  // bootstrap; 0 means round(sqrt(n))
    std::size_t replicates = 27000;
    std::uint64_t seed = 1;
};

/// Elementwise a - b. Period keys must match exactly; the first mismatch is
/// named in the error.
ScoreSeries difference_series(const ScoreSeries& a, const ScoreSeries& b);

/// Pearson correlation of (x_t, x_{t+1}) pairs. Needs length >= 3 and
/// nonzero variance on both lagged subseries.
double lag1_correlation(const ScoreSeries& s);

/// Classic mean +- t_{n-1,(1+level)/2} * s/sqrt(n) with the unbiased sample
/// standard deviation. A constant series yields the degenerate interval
/// [mean, mean].
CiResult student_t_ci(const ScoreSeries& diff, double level);

/// Diebold-Mariano interval with the Harvey/Leybourne/Newbold small-sample
/// correction. The long-run variance of the mean uses 1/n-normalised sample
/// autocovariances truncated at horizon-1:
///   V = (gamma_0 + 2*sum_{k=1}^{h-1} gamma_k) / n,
/// the statistic is kappa * mean / sqrt(V) with
///   kappa = sqrt((n + 1 - 2h + h(h-1)/n) / n),
/// referred to a t distribution with n-1 degrees of freedom, and the CI
/// inverts that test. Throws when the truncated variance estimate is not
/// positive (use the block bootstrap in that case).
CiResult diebold_mariano_ci(const ScoreSeries& diff, int horizon, double level);

/// Percentile CI from circular block bootstrap resampling: each replicate
/// concatenates ceil(n/block_length) blocks of consecutive values (wrapping
/// past the end), truncated to n, and records its mean. Replicate b draws
/// from an RNG stream derived from (seed, b), so results are independent of
/// evaluation order and bit-reproducible for a fixed seed.
CiResult circular_block_bootstrap_ci(const ScoreSeries& diff, std::size_t block_length,
                                     std::size_t replicates, double level, std::uint64_t seed);

/// Dispatch on method with shared options.
CiResult compute_ci(const ScoreSeries& diff, CiMethod method, double level,
                    const InferenceOptions& options = {});

enum class Alternative { greater, less };

/// One-sided test derived from the chosen method. For `greater` the null is
/// "mean <= 0": `bound` is the level-confidence lower bound for the mean and
/// the null is rejected when it exceeds zero (mirrored for `less`).
struct TestResult {
    bool reject = false;
    double bound = 0.0;
    double p_value = 1.0;
    double level = 0.0;
    std::string method;
};

TestResult one_sided_test(const ScoreSeries& diff, CiMethod method, double level,
                          Alternative alternative = Alternative::greater,
                          const InferenceOptions& options = {});

/// Fraction of exactly-zero values; above 0.9 the CI methods attach a
/// zero-inflation warning to their result.
double zero_fraction(const ScoreSeries& s);

} // namespace firm
