#include "firm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "firm/errors.hpp"
#include "firm/normal.hpp"

namespace firm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// ---------------------------------------------------------------------------
// Gaussian

double gauss_cdf(const Gaussian& g, double t) { return norm_cdf((t - g.mean) / g.sd); }

double gauss_quantile(const Gaussian& g, double alpha) {
    return g.mean + g.sd * norm_quantile(alpha);
}

double gauss_lower_partial(const Gaussian& g, double x) {
    const double z = (x - g.mean) / g.sd;
    return g.sd * (z * norm_cdf(z) + norm_pdf(z));
}

double gauss_upper_partial(const Gaussian& g, double x) {
    const double z = (x - g.mean) / g.sd;
    return g.sd * (norm_pdf(z) - z * norm_cdf(-z));
}

// ---------------------------------------------------------------------------
// PointMassPlusExponentialTail

double tail_cdf(const PointMassPlusExponentialTail& d, double t) {
    if (t < d.lower_bound) return 0.0;
    return 1.0 - (1.0 - d.p0) * std::exp(-(t - d.lower_bound) / d.scale);
}

double tail_quantile(const PointMassPlusExponentialTail& d, double alpha) {
    if (alpha <= d.p0) return d.lower_bound;
    return d.lower_bound - d.scale * std::log((1.0 - alpha) / (1.0 - d.p0));
}

double tail_lower_partial(const PointMassPlusExponentialTail& d, double x) {
    if (x <= d.lower_bound) return 0.0;
    const double u = x - d.lower_bound;
    return u - (1.0 - d.p0) * d.scale * (1.0 - std::exp(-u / d.scale));
}

double tail_upper_partial(const PointMassPlusExponentialTail& d, double x) {
    if (x <= d.lower_bound) return (d.lower_bound - x) + (1.0 - d.p0) * d.scale;
    return (1.0 - d.p0) * d.scale * std::exp(-(x - d.lower_bound) / d.scale);
}

// ---------------------------------------------------------------------------
// PiecewiseLinearCdf

void validate_knots(const PiecewiseLinearCdf& d) {
    require(!d.knots.empty(), "PiecewiseLinearCdf: at least one knot required");
    double prev_v = -kInf;
    double prev_p = 0.0;
    for (const auto& k : d.knots) {
        require(std::isfinite(k.value), "PiecewiseLinearCdf: knot values must be finite");
        require(k.value > prev_v, "PiecewiseLinearCdf: knot values must be strictly increasing");
        require(k.cum_prob >= 0.0 && k.cum_prob <= 1.0,
                "PiecewiseLinearCdf: cum_prob must lie in [0,1]");
        require(k.cum_prob >= prev_p, "PiecewiseLinearCdf: cum_prob must be nondecreasing");
        prev_v = k.value;
        prev_p = k.cum_prob;
    }
    require(d.knots.back().cum_prob == 1.0, "PiecewiseLinearCdf: last cum_prob must equal 1");
}

double pw_cdf(const PiecewiseLinearCdf& d, double t) {
    const auto& ks = d.knots;
    if (t < ks.front().value) return 0.0;
    if (t >= ks.back().value) return 1.0;
    auto it = std::upper_bound(ks.begin(), ks.end(), t,
                               [](double v, const CdfKnot& k) { return v < k.value; });
    // ks[it-1].value <= t < ks[it].value
    const CdfKnot& a = *(it - 1);
    const CdfKnot& b = *it;
    return a.cum_prob + (b.cum_prob - a.cum_prob) * (t - a.value) / (b.value - a.value);
}

double pw_cdf_left(const PiecewiseLinearCdf& d, double t) {
    if (t <= d.knots.front().value) return 0.0;
    return pw_cdf(d, t); // continuous except at the first knot
}

double pw_quantile(const PiecewiseLinearCdf& d, double alpha) {
    const auto& ks = d.knots;
    auto it = std::lower_bound(ks.begin(), ks.end(), alpha,
                               [](const CdfKnot& k, double p) { return k.cum_prob < p; });
    if (it == ks.begin()) return ks.front().value;
    const CdfKnot& a = *(it - 1);
    const CdfKnot& b = *it;
    return a.value + (b.value - a.value) * (alpha - a.cum_prob) / (b.cum_prob - a.cum_prob);
}

double pw_lower_partial(const PiecewiseLinearCdf& d, double x) {
    const auto& ks = d.knots;
    if (x <= ks.front().value) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        const CdfKnot& a = ks[i - 1];
        const CdfKnot& b = ks[i];
        if (x >= b.value) {
            acc += (b.value - a.value) * 0.5 * (a.cum_prob + b.cum_prob);
        } else {
            const double fx = a.cum_prob +
                              (b.cum_prob - a.cum_prob) * (x - a.value) / (b.value - a.value);
            acc += (x - a.value) * 0.5 * (a.cum_prob + fx);
            return acc;
        }
    }
    return acc + (x - ks.back().value);
}

double pw_upper_partial(const PiecewiseLinearCdf& d, double x) {
    const auto& ks = d.knots;
    if (x >= ks.back().value) return 0.0;
    double acc = 0.0;
    for (std::size_t i = ks.size(); i-- > 1;) {
        const CdfKnot& a = ks[i - 1];
        const CdfKnot& b = ks[i];
        if (x <= a.value) {
            acc += (b.value - a.value) * 0.5 * ((1.0 - a.cum_prob) + (1.0 - b.cum_prob));
        } else {
            const double fx = a.cum_prob +
                              (b.cum_prob - a.cum_prob) * (x - a.value) / (b.value - a.value);
            acc += (b.value - x) * 0.5 * ((1.0 - fx) + (1.0 - b.cum_prob));
            return acc;
        }
    }
    return acc + (ks.front().value - x);
}

// ---------------------------------------------------------------------------
// EmpiricalSample (values sorted at construction)

double emp_cdf(const EmpiricalSample& d, double t) {
    const auto& v = d.values;
    const auto k = std::upper_bound(v.begin(), v.end(), t) - v.begin();
    return static_cast<double>(k) / static_cast<double>(v.size());
}

double emp_cdf_left(const EmpiricalSample& d, double t) {
    const auto& v = d.values;
    const auto k = std::lower_bound(v.begin(), v.end(), t) - v.begin();
    return static_cast<double>(k) / static_cast<double>(v.size());
}

double emp_quantile(const EmpiricalSample& d, double alpha) {
    const auto n = d.values.size();
    // smallest i with (i+1)/n >= alpha; tiny slack guards against the product
    // alpha*n landing just above an integer through rounding
    auto i = static_cast<std::size_t>(
        std::max(0.0, std::ceil(alpha * static_cast<double>(n) - 1e-9) - 1.0));
    if (i >= n) i = n - 1;
    return d.values[i];
}

double emp_lower_partial(const EmpiricalSample& d, double x) {
    const auto& v = d.values;
    double acc = 0.0;
    for (double vi : v) {
        if (vi > x) break;
        acc += x - vi;
    }
    return acc / static_cast<double>(v.size());
}

double emp_upper_partial(const EmpiricalSample& d, double x) {
    const auto& v = d.values;
    double acc = 0.0;
    for (auto it = v.rbegin(); it != v.rend() && *it > x; ++it) acc += *it - x;
    return acc / static_cast<double>(v.size());
}

double emp_mean(const EmpiricalSample& d) {
    double acc = 0.0;
    for (double vi : d.values) acc += vi;
    return acc / static_cast<double>(d.values.size());
}

} // namespace

// ---------------------------------------------------------------------------

void HuberParams::validate() const {
    require(alpha > 0.0 && alpha < 1.0, "HuberParams: alpha must lie strictly in (0,1)");
    require(a >= 0.0 && !std::isnan(a), "HuberParams: a must be nonnegative (+inf allowed)");
}

PredictiveDistribution::PredictiveDistribution(Gaussian g) : repr_(g) {
    require(std::isfinite(g.mean), "Gaussian: mean must be finite");
    require(g.sd > 0.0 && std::isfinite(g.sd), "Gaussian: sd must be positive and finite");
}

PredictiveDistribution::PredictiveDistribution(PointMassPlusExponentialTail t) : repr_(t) {
    require(t.p0 >= 0.0 && t.p0 < 1.0,
            "PointMassPlusExponentialTail: p0 must lie in [0,1)");
    require(t.scale > 0.0 && std::isfinite(t.scale),
            "PointMassPlusExponentialTail: scale must be positive and finite");
    require(std::isfinite(t.lower_bound),
            "PointMassPlusExponentialTail: lower bound must be finite");
}

PredictiveDistribution::PredictiveDistribution(PiecewiseLinearCdf c) : repr_(std::move(c)) {
    validate_knots(std::get<PiecewiseLinearCdf>(repr_));
}

PredictiveDistribution::PredictiveDistribution(EmpiricalSample s) : repr_(std::move(s)) {
    auto& sample = std::get<EmpiricalSample>(repr_);
    require(!sample.values.empty(), "EmpiricalSample: sample must be nonempty");
    for (double v : sample.values) require(std::isfinite(v), "EmpiricalSample: values must be finite");
    std::sort(sample.values.begin(), sample.values.end());
}

double PredictiveDistribution::cdf(double t) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return gauss_cdf(d, t);
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>) return tail_cdf(d, t);
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) return pw_cdf(d, t);
            else return emp_cdf(d, t);
        },
        repr_);
}

double PredictiveDistribution::cdf_left_limit(double t) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return gauss_cdf(d, t);
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>)
                return t <= d.lower_bound ? 0.0 : tail_cdf(d, t);
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) return pw_cdf_left(d, t);
            else return emp_cdf_left(d, t);
        },
        repr_);
}

double PredictiveDistribution::quantile(double alpha) const {
    require(alpha > 0.0 && alpha < 1.0, "quantile: alpha must lie strictly in (0,1)");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return gauss_quantile(d, alpha);
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>)
                return tail_quantile(d, alpha);
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) return pw_quantile(d, alpha);
            else return emp_quantile(d, alpha);
        },
        repr_);
}

double PredictiveDistribution::mean() const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return d.mean;
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>)
                return d.lower_bound + (1.0 - d.p0) * d.scale;
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>)
                // E[Y] = c + E[(Y-c)^+] - E[(c-Y)^+] with c at the first knot
                return d.knots.front().value + pw_upper_partial(d, d.knots.front().value);
            else return emp_mean(d);
        },
        repr_);
}

double PredictiveDistribution::lower_partial(double x) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return gauss_lower_partial(d, x);
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>)
                return tail_lower_partial(d, x);
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) return pw_lower_partial(d, x);
            else return emp_lower_partial(d, x);
        },
        repr_);
}

double PredictiveDistribution::upper_partial(double x) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return gauss_upper_partial(d, x);
            else if constexpr (std::is_same_v<T, PointMassPlusExponentialTail>)
                return tail_upper_partial(d, x);
            else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) return pw_upper_partial(d, x);
            else return emp_upper_partial(d, x);
        },
        repr_);
}

double PredictiveDistribution::cdf_integral(double lo, double hi) const {
    require(lo <= hi, "cdf_integral: lo must not exceed hi");
    return lower_partial(hi) - lower_partial(lo);
}

double cdf(const PredictiveDistribution& f, double t) { return f.cdf(t); }

double quantile(const PredictiveDistribution& f, double alpha) { return f.quantile(alpha); }

bool is_quantile(const PredictiveDistribution& f, double alpha, double x) {
    require(alpha > 0.0 && alpha < 1.0, "is_quantile: alpha must lie strictly in (0,1)");
    // slack absorbs interpolation round-trip error in quantile(cdf(.)) chains
    constexpr double kTol = 1e-12;
    return f.cdf_left_limit(x) <= alpha + kTol && alpha <= f.cdf(x) + kTol;
}

namespace {

struct HuberResidual {
    const PredictiveDistribution& f;
    double alpha;
    double a; // finite positive or +inf

    // alpha * integral_[x,x+a] (1-F)  -  (1-alpha) * integral_[x-a,x] F.
    // Nonincreasing in x, positive at -inf and negative at +inf.
    double operator()(double x) const {
        if (std::isinf(a)) {
            return alpha * f.upper_partial(x) - (1.0 - alpha) * f.lower_partial(x);
        }
        const double below = f.cdf_integral(x - a, x);
        const double above = a - f.cdf_integral(x, x + a);
        return alpha * above - (1.0 - alpha) * below;
    }

    double scale(double x) const {
        if (std::isinf(a)) {
            return alpha * f.upper_partial(x) + (1.0 - alpha) * f.lower_partial(x);
        }
        const double below = f.cdf_integral(x - a, x);
        const double above = a - f.cdf_integral(x, x + a);
        return alpha * above + (1.0 - alpha) * below;
    }
};

} // namespace

double huber_quantile(const PredictiveDistribution& f, HuberParams params) {
    params.validate();
    if (params.a == 0.0) return f.quantile(params.alpha);

    const HuberResidual g{f, params.alpha, params.a};

    constexpr double kEdge = 1e-3;
    const double widen = std::isinf(params.a) ? 0.0 : params.a;
    double lo = f.quantile(std::min(params.alpha, kEdge)) - widen;
    double hi = f.quantile(std::max(params.alpha, 1.0 - kEdge)) + widen;
    if (lo > hi) std::swap(lo, hi);

    // expand until the (nonincreasing) residual brackets zero
    double step = std::max(1.0, hi - lo);
    for (int i = 0; g(lo) < 0.0; ++i) {
        if (i >= 64) throw SolverError("huber_quantile: failed to bracket from below", lo, hi);
        lo -= step;
        step *= 2.0;
    }
    step = std::max(1.0, hi - lo);
    for (int i = 0; g(hi) > 0.0; ++i) {
        if (i >= 64) throw SolverError("huber_quantile: failed to bracket from above", lo, hi);
        hi += step;
        step *= 2.0;
    }

    constexpr int kMaxIter = 200;
    constexpr double kXTol = 1e-10;
    constexpr double kResidualTol = 1e-12;
    for (int i = 0; i < kMaxIter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double r = g(mid);
        if (std::abs(r) <= kResidualTol * std::max(g.scale(mid), 1e-300)) return mid;
        if (r > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo <= kXTol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
            return 0.5 * (lo + hi);
        }
    }
    throw SolverError("huber_quantile: bisection did not converge", lo, hi);
}

double expectile(const PredictiveDistribution& f, double alpha) {
    return huber_quantile(f, HuberParams{alpha, kInf});
}

} // namespace firm
