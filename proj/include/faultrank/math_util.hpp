#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "faultrank/errors.hpp"

namespace faultrank {

/// Digamma function for x > 0. Recurrence shift into the asymptotic regime,
/// then the standard Bernoulli-number expansion. Absolute error < 1e-12 over
/// the integer arguments used by the k-NN estimators.
inline double digamma(double x) {
    if (!(x > 0.0)) throw ParamError("digamma: argument must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv
              - inv2 * (1.0 / 12.0 -
                        inv2 * (1.0 / 120.0 -
                                inv2 * (1.0 / 252.0 -
                                        inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return result;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw ParamError("mean: empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample variance (n-1 denominator).
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw ParamError("sample_variance: need at least 2 points");
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

inline double sample_std(const std::vector<double>& v) {
    return std::sqrt(sample_variance(v));
}

/// Lag-k autocorrelation (biased normalisation, standard for diagnostics).
inline double autocorrelation(const std::vector<double>& v, std::size_t lag) {
    if (v.size() <= lag + 1) throw ParamError("autocorrelation: series too short");
    const double m = mean(v);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - m) * (v[i] - m);
        if (i + lag < v.size()) num += (v[i] - m) * (v[i + lag] - m);
    }
    if (den == 0.0) return 0.0;
    return num / den;
}

inline double l1_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
}

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

}  // namespace faultrank
