#pragma once

#include <variant>
#include <vector>

namespace firm {

/// Normal predictive distribution N(mean, sd^2).
struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;

    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// A point mass of probability p0 at `lower_bound` plus an exponential tail
/// above it: F(t) = 1 - (1-p0) * exp(-(t - lower_bound)/scale) for
/// t >= lower_bound, 0 below. Models e.g. a dry/wet precipitation split.
struct PointMassPlusExponentialTail {
    double p0 = 0.0;
    double scale = 1.0;
    double lower_bound = 0.0;

    friend bool operator==(const PointMassPlusExponentialTail&,
                           const PointMassPlusExponentialTail&) = default;
};

struct CdfKnot {
    double value = 0.0;
    double cum_prob = 0.0;

    friend bool operator==(const CdfKnot&, const CdfKnot&) = default;
};

/// CDF that is 0 below the first knot, linearly interpolated between knots
/// and 1 from the last knot on. A first knot with cum_prob > 0 places an
/// atom at that value. Knots must be strictly increasing in value,
/// nondecreasing in cum_prob, and the last cum_prob must equal 1.
struct PiecewiseLinearCdf {
    std::vector<CdfKnot> knots;

    friend bool operator==(const PiecewiseLinearCdf&, const PiecewiseLinearCdf&) = default;
};

/// The right-continuous empirical step CDF of a nonempty sample.
struct EmpiricalSample {
    std::vector<double> values;

    friend bool operator==(const EmpiricalSample&, const EmpiricalSample&) = default;
};

/// Risk-functional parameters: alpha in (0,1) and the discounting distance
/// a in [0, +inf]. a = 0 selects the quantile, a = +inf the expectile,
/// anything between a Huber quantile.
struct HuberParams {
    double alpha = 0.5;
    double a = 0.0;

    void validate() const;
};

/// A predictive distribution identified with its CDF. All queries are pure;
/// instances are immutable after construction and safe to share across
/// threads.
class PredictiveDistribution {
public:
    using Representation =
        std::variant<Gaussian, PointMassPlusExponentialTail, PiecewiseLinearCdf, EmpiricalSample>;

    PredictiveDistribution(Gaussian g);                        // NOLINT(google-explicit-constructor)
    PredictiveDistribution(PointMassPlusExponentialTail tail); // NOLINT(google-explicit-constructor)
    PredictiveDistribution(PiecewiseLinearCdf cdf);            // NOLINT(google-explicit-constructor)
    PredictiveDistribution(EmpiricalSample sample);            // NOLINT(google-explicit-constructor)

    const Representation& representation() const { return repr_; }

    friend bool operator==(const PredictiveDistribution& a, const PredictiveDistribution& b) {
        return a.repr_ == b.repr_;
    }

    /// F(t).
    double cdf(double t) const;

    /// Left limit F(t-); differs from cdf(t) only at atoms.
    double cdf_left_limit(double t) const;

    /// Lower generalized inverse inf{t : F(t) >= alpha}, alpha in (0,1).
    double quantile(double alpha) const;

    /// E[Y].
    double mean() const;

    /// Integral of F over (-inf, x], i.e. E[(x - Y)^+].
    double lower_partial(double x) const;

    /// Integral of (1 - F) over [x, +inf), i.e. E[(Y - x)^+].
    double upper_partial(double x) const;

    /// Integral of F over [lo, hi].
    double cdf_integral(double lo, double hi) const;

private:
    Representation repr_;
};

/// Free-function spellings of the basic queries.
double cdf(const PredictiveDistribution& f, double t);
double quantile(const PredictiveDistribution& f, double alpha);

/// Set-membership test for the alpha-quantile set Q^alpha(F):
/// F(x-) <= alpha <= F(x), with a 1e-12 slack absorbing floating-point
/// round-trips. Useful when the quantile set is an interval.
bool is_quantile(const PredictiveDistribution& f, double alpha, double x);

/// The Huber quantile H^alpha_a(F): the x balancing
///   alpha * integral_[x, x+a] (1 - F)  =  (1 - alpha) * integral_[x-a, x] F.
/// Returns quantile(f, alpha) for a = 0 and the alpha-expectile for
/// a = +inf. Throws SolverError if the bracketed bisection fails.
double huber_quantile(const PredictiveDistribution& f, HuberParams params);

/// The alpha-expectile, i.e. huber_quantile with a = +inf.
double expectile(const PredictiveDistribution& f, double alpha);

} // namespace firm
