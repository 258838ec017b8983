#pragma once

// Shared test utilities: independent numerical oracles (kept free of the
// library's solver paths) and random generators for property tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "firm/distribution.hpp"
#include "firm/scoring.hpp"
#include "firm/verification.hpp"

namespace firm::testing {

/// Independent quantile oracle: plain bisection on the CDF, no use of the
/// library's quantile routines.
inline double bisection_quantile_oracle(const PredictiveDistribution& f, double alpha,
                                        double lo = -1e6, double hi = 1e6) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f.cdf(mid) >= alpha) hi = mid;
        else lo = mid;
    }
    return hi;
}

/// Dense-grid trapezoid evaluation of the two sides of the Huber balance
/// equation at x (step 1e-4 unless overridden).
inline double trapezoid_huber_residual(const PredictiveDistribution& f, double alpha, double a,
                                       double x, double step = 1e-4) {
    const auto integrate = [&](double lo, double hi, bool survival) {
        double acc = 0.0;
        double t0 = lo;
        double f0 = survival ? 1.0 - f.cdf(t0) : f.cdf(t0);
        while (t0 < hi) {
            const double t1 = std::min(hi, t0 + step);
            const double f1 = survival ? 1.0 - f.cdf(t1) : f.cdf(t1);
            acc += 0.5 * (f0 + f1) * (t1 - t0);
            t0 = t1;
            f0 = f1;
        }
        return acc;
    };
    return alpha * integrate(x, x + a, true) - (1.0 - alpha) * integrate(x - a, x, false);
}

/// Brute-force Huber quantile: bisection on the trapezoid residual.
inline double trapezoid_huber_oracle(const PredictiveDistribution& f, double alpha, double a,
                                     double lo, double hi, double step = 1e-4) {
    for (int i = 0; i < 100 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (trapezoid_huber_residual(f, alpha, a, mid, step) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Brute-force expectile: bisection on the first-order condition
/// alpha*E[(Y-x)^+] - (1-alpha)*E[(x-Y)^+] evaluated by numerical
/// integration of the CDF (upper tail integrated to where 1-F < 1e-12).
inline double expectile_oracle(const PredictiveDistribution& f, double alpha, double lo,
                               double hi, double step = 1e-4) {
    const auto upper = [&](double x) {
        double acc = 0.0;
        double t = x;
        double s = 1.0 - f.cdf(t);
        while (s > 1e-12) {
            const double s2 = 1.0 - f.cdf(t + step);
            acc += 0.5 * (s + s2) * step;
            t += step;
            s = s2;
        }
        return acc;
    };
    const auto lower = [&](double x) {
        double acc = 0.0;
        double t = x;
        double s = f.cdf(t);
        while (s > 1e-12) {
            const double s2 = f.cdf(t - step);
            acc += 0.5 * (s + s2) * step;
            t -= step;
            s = s2;
        }
        return acc;
    };
    for (int i = 0; i < 100 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (alpha * upper(mid) - (1.0 - alpha) * lower(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Random strictly increasing piecewise-linear CDF with no flat stretches.
inline PredictiveDistribution random_strict_piecewise(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_knots(3, 7);
    std::uniform_real_distribution<double> value(-20.0, 20.0);
    const int n = n_knots(rng);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = value(rng);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] < 1e-3) values[i] = values[i - 1] + 1e-3;
    }
    std::vector<double> probs(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    probs[0] = 0.0;
    for (std::size_t i = 1; i < probs.size(); ++i) probs[i] = probs[i - 1] + gap(rng);
    for (auto& p : probs) p /= probs.back();
    PiecewiseLinearCdf cdf;
    for (std::size_t i = 0; i < values.size(); ++i) cdf.knots.push_back({values[i], probs[i]});
    return PredictiveDistribution(std::move(cdf));
}

/// Random discrete distribution as an empirical sample over a value grid,
/// returned together with the distinct (value, count) support.
struct DiscreteDistribution {
    PredictiveDistribution distribution;
    std::vector<double> values;
    std::vector<int> counts;
    int total = 0;
};

inline DiscreteDistribution random_discrete(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_points(2, 8);
    std::uniform_real_distribution<double> value(-12.0, 12.0);
    std::uniform_int_distribution<int> count(1, 5);
    const int n = n_points(rng);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = value(rng);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] < 1e-6) values[i] = values[i - 1] + 1e-3;
    }
    DiscreteDistribution out{PredictiveDistribution(EmpiricalSample{{0.0}}), {}, {}, 0};
    EmpiricalSample sample;
    for (double v : values) {
        const int c = count(rng);
        out.values.push_back(v);
        out.counts.push_back(c);
        out.total += c;
        for (int k = 0; k < c; ++k) sample.values.push_back(v);
    }
    out.distribution = PredictiveDistribution(std::move(sample));
    return out;
}

/// Random FIRM spec with a = 0.
inline FirmSpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_thresholds(1, 4);
    std::uniform_real_distribution<double> threshold(-10.0, 10.0);
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    std::uniform_real_distribution<double> alpha(0.02, 0.98);
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
    spec.alpha = alpha(rng);
    spec.a = 0.0;
    return spec;
}

/// Lead-day-1 NSW rainfall contingency tables (categories: below 50mm,
/// 50-100mm, above 100mm; row = forecast, column = observed).
inline ContingencyTable ocf_table() {
    return ContingencyTable(3, {77984, 259, 37, 199, 136, 50, 6, 15, 27});
}

inline ContingencyTable official_table() {
    return ContingencyTable(3, {77658, 165, 13, 451, 171, 36, 80, 74, 65});
}

} // namespace firm::testing
