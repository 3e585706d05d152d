#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "faultrank/errors.hpp"
#include "faultrank/matrix.hpp"

namespace faultrank {

/// Time-delay embedding parameters for a source/target pair.
///
/// `k_target` past values of the target (spaced `tau` apart, ending one
/// sample before the predicted value) condition the estimate; `l_source`
/// past values of the source end `h` samples before the predicted value.
/// Negative `h` places the source block after the predicted sample and is
/// only meaningful inside directionality sweeps.
struct EmbeddingSpec {
    int k_target = 1;
    int l_source = 1;
    int tau = 1;
    int h = 1;

    void validate(std::size_t n_samples) const {
        if (k_target < 1 || l_source < 1 || tau < 1)
            throw ParamError("embedding: k, l and tau must be >= 1");
        const long required =
            static_cast<long>(std::max(k_target, l_source) - 1) * tau + std::labs(h) + 1;
        if (required >= static_cast<long>(n_samples))
            throw ParamError("embedding: history length " + std::to_string(required) +
                             " does not fit " + std::to_string(n_samples) + " samples");
    }
};

/// State matrix whose row for time t is {x_{t-(dim-1)tau}, ..., x_{t-tau}, x_t},
/// evaluated at end index t + end_offset. Rows from calls with equal
/// end_offset line up on the same prediction index.
inline Matrix embed(const std::vector<double>& series, int dim, int tau, int end_offset = 0) {
    if (dim < 1 || tau < 1) throw ParamError("embed: dim and tau must be >= 1");
    const long n = static_cast<long>(series.size());
    const long span = static_cast<long>(dim - 1) * tau;
    long t_lo = 0;
    while (t_lo + end_offset - span < 0) ++t_lo;
    long t_hi = n - 1;
    while (t_hi >= t_lo && t_hi + end_offset > n - 1) --t_hi;
    if (t_hi < t_lo) throw ParamError("embed: series too short for requested state");
    Matrix out(static_cast<std::size_t>(t_hi - t_lo + 1), static_cast<std::size_t>(dim));
    for (long t = t_lo; t <= t_hi; ++t) {
        const long end = t + end_offset;
        for (int j = 0; j < dim; ++j)
            out(static_cast<std::size_t>(t - t_lo), static_cast<std::size_t>(j)) =
                series[static_cast<std::size_t>(end - static_cast<long>(dim - 1 - j) * tau)];
    }
    return out;
}

namespace detail {

/// Joint sample layout used by both estimators: per evaluation index t the
/// row is [future | target history (k) | source history (l)].
struct JointSamples {
    std::size_t n = 0;
    int k = 0, l = 0;
    std::vector<double> full;    // n x (1 + k + l)
    std::vector<double> cond;    // n x k          (target history)
    std::vector<double> fut_cond;  // n x (1 + k)  (future + target history)
    std::vector<double> cond_src;  // n x (k + l)  (target history + source)
};

inline JointSamples assemble_joint(const std::vector<double>& source,
                                   const std::vector<double>& target,
                                   const EmbeddingSpec& spec) {
    if (source.size() != target.size())
        throw ParamError("te: source and target must have equal length");
    spec.validate(target.size());
    const long n_total = static_cast<long>(target.size());
    const int k = spec.k_target;
    const int l = spec.l_source;
    const long tau = spec.tau;
    const long h = spec.h;

    long t_lo = std::max<long>(1 + static_cast<long>(k - 1) * tau,
                               h + static_cast<long>(l - 1) * tau);
    t_lo = std::max<long>(t_lo, 0);
    const long t_hi = std::min<long>(n_total - 1, n_total - 1 + std::min<long>(h, 0));
    if (t_hi < t_lo) throw ParamError("te: no evaluation points for this embedding");

    JointSamples js;
    js.n = static_cast<std::size_t>(t_hi - t_lo + 1);
    js.k = k;
    js.l = l;
    const std::size_t d_full = static_cast<std::size_t>(1 + k + l);
    js.full.resize(js.n * d_full);
    for (long t = t_lo; t <= t_hi; ++t) {
        double* row = js.full.data() + static_cast<std::size_t>(t - t_lo) * d_full;
        row[0] = target[static_cast<std::size_t>(t)];
        for (int j = 0; j < k; ++j)
            row[1 + j] = target[static_cast<std::size_t>(t - 1 - static_cast<long>(j) * tau)];
        for (int j = 0; j < l; ++j)
            row[1 + k + j] = source[static_cast<std::size_t>(t - h - static_cast<long>(j) * tau)];
    }

    js.cond.resize(js.n * static_cast<std::size_t>(k));
    js.fut_cond.resize(js.n * static_cast<std::size_t>(1 + k));
    js.cond_src.resize(js.n * static_cast<std::size_t>(k + l));
    for (std::size_t i = 0; i < js.n; ++i) {
        const double* row = js.full.data() + i * d_full;
        std::copy(row + 1, row + 1 + k, js.cond.data() + i * static_cast<std::size_t>(k));
        std::copy(row, row + 1 + k, js.fut_cond.data() + i * static_cast<std::size_t>(1 + k));
        std::copy(row + 1, row + 1 + k + l,
                  js.cond_src.data() + i * static_cast<std::size_t>(k + l));
    }
    return js;
}

}  // namespace detail

}  // namespace faultrank
