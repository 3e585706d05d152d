#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "faultrank/errors.hpp"
#include "faultrank/math_util.hpp"
#include "faultrank/matrix.hpp"

namespace faultrank {

enum class RankMethod { eigenvector, katz };

inline std::string to_string(RankMethod m) {
    return m == RankMethod::eigenvector ? "eigenvector" : "katz";
}

struct RankSpec {
    double m = 0.999;                 // transition/reset mixing weight
    std::vector<double> reset_bias;   // empty = uniform
    double katz_alpha_fraction = 0.999;

    void validate() const {
        if (!(m > 0.0 && m < 1.0)) throw ParamError("rank: m must be in (0, 1)");
        if (!(katz_alpha_fraction > 0.0 && katz_alpha_fraction < 1.0))
            throw ParamError("rank: katz_alpha_fraction must be in (0, 1)");
    }
};

struct CentralityScores {
    std::vector<double> scores;  // non-negative, L1-normalised
    RankMethod method = RankMethod::eigenvector;
    double lambda_max = 0.0;
    std::size_t iterations = 0;
};

/// Scales every row with a positive sum to sum one; all-zero rows stay zero
/// (the reset mixing handles them).
inline Matrix row_normalise(const Matrix& m) {
    Matrix out = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (m(r, c) < 0.0) throw ParamError("row_normalise: negative entry");
            sum += m(r, c);
        }
        if (sum > 0.0)
            for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) / sum;
    }
    return out;
}

namespace detail {

inline std::vector<double> normalised_reset_bias(const RankSpec& spec, std::size_t v) {
    std::vector<double> q = spec.reset_bias;
    if (q.empty()) q.assign(v, 1.0);
    if (q.size() != v) throw ParamError("rank: reset bias length does not match node count");
    double sum = 0.0;
    for (double x : q) {
        if (x < 0.0) throw ParamError("rank: reset bias entries must be >= 0");
        sum += x;
    }
    if (sum <= 0.0) throw ParamError("rank: reset bias must have a positive entry");
    for (double& x : q) x /= sum;
    return q;
}

}  // namespace detail

/// Blends the row-normalised influence matrix with the reset matrix whose
/// every row is the normalised bias vector, then row-normalises once more so
/// rows that were all-zero (nodes without incoming influence) still sum to
/// one. The result is the transition matrix of the source-tracing walk.
inline Matrix mix_with_reset(const Matrix& weights, const RankSpec& spec) {
    spec.validate();
    const std::size_t v = weights.rows();
    if (v < 2 || weights.cols() != v)
        throw ParamError("mix_with_reset: need a square matrix with >= 2 nodes");
    const auto q = detail::normalised_reset_bias(spec, v);
    Matrix m = row_normalise(weights);
    for (std::size_t r = 0; r < v; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < v; ++c) {
            m(r, c) = spec.m * m(r, c) + (1.0 - spec.m) * q[c];
            sum += m(r, c);
        }
        for (std::size_t c = 0; c < v; ++c) m(r, c) /= sum;
    }
    return m;
}

/// Perron vector of the transposed walk matrix by damped power iteration.
///
/// The plain iteration stalls on nearly periodic walks (complex subdominant
/// eigenvalues of magnitude close to m), so each step averages the iterate
/// with its image: x <- (x + Wx)/2. The fixed point is unchanged and the
/// L1 step change bounds the residual ||Wx - x||_1 by twice its value.
inline CentralityScores eigenvector_centrality(const Matrix& mixed, const RankSpec& spec,
                                               double tolerance = 1e-12,
                                               std::size_t max_iterations = 10000) {
    spec.validate();
    const std::size_t v = mixed.rows();
    if (v == 0 || mixed.cols() != v) throw ParamError("eigenvector_centrality: square matrix required");
    const Matrix w = transpose(mixed);

    std::vector<double> x(v, 1.0 / static_cast<double>(v));
    std::size_t iter = 0;
    double change = 0.0;
    for (; iter < max_iterations; ++iter) {
        auto next = multiply(w, x);
        for (std::size_t i = 0; i < v; ++i) next[i] = 0.5 * (x[i] + next[i]);
        const double sum = l1_norm(next);
        for (auto& value : next) value /= sum;
        change = l1_distance(next, x);
        x = std::move(next);
        if (change < tolerance) break;
    }
    if (change >= tolerance)
        throw NumericalError("eigenvector_centrality: no convergence after " +
                             std::to_string(max_iterations) + " iterations (residual " +
                             std::to_string(change) + ")");

    CentralityScores result;
    result.scores = std::move(x);
    result.method = RankMethod::eigenvector;
    result.lambda_max = 1.0;
    result.iterations = iter + 1;
    return result;
}

/// Dominant eigenvalue of a non-negative matrix. Power iteration on the
/// diagonally shifted matrix, which converges even for periodic structures.
inline double spectral_radius(const Matrix& w, std::size_t max_iterations = 10000,
                              double tolerance = 1e-12) {
    const std::size_t v = w.rows();
    if (v == 0 || w.cols() != v) throw ParamError("spectral_radius: square matrix required");
    double shift = 0.0;
    for (std::size_t r = 0; r < v; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < v; ++c) {
            if (w(r, c) < 0.0) throw ParamError("spectral_radius: negative entry");
            row_sum += w(r, c);
        }
        shift = std::max(shift, row_sum);
    }
    if (shift == 0.0) return 0.0;

    // Nilpotent matrices (DAG walk structure) drive the shifted iteration to
    // zero only algebraically; detect them directly by propagating a positive
    // vector through at most v steps.
    {
        std::vector<double> probe(v, 1.0);
        for (std::size_t step = 0; step < v; ++step) {
            probe = multiply(w, probe);
            const double norm = l1_norm(probe);
            if (norm == 0.0) return 0.0;
            for (auto& value : probe) value /= norm;
        }
    }

    std::vector<double> x(v, 1.0 / static_cast<double>(v));
    double lambda = 0.0;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        auto next = multiply(w, x);
        for (std::size_t i = 0; i < v; ++i) next[i] += shift * x[i];
        const double norm = l1_norm(next);
        if (norm == 0.0) return 0.0;
        for (auto& value : next) value /= norm;
        const double estimate = norm - shift;
        const bool done = std::abs(estimate - lambda) < tolerance * std::max(1.0, shift);
        lambda = estimate;
        x = std::move(next);
        if (done) break;
    }
    return std::max(lambda, 0.0);
}

/// Katz centrality: attenuated weighted count of all outgoing walks,
/// c = sum_p alpha^p W^p 1, evaluated by iterating c <- alpha W (c + 1).
/// The attenuation is the requested fraction of 1/lambda_max; graphs with a
/// zero spectral radius (DAGs) converge for any attenuation, where the
/// fraction itself is used. An all-zero graph has no walks and resolves to
/// uniform scores.
inline CentralityScores katz_centrality(const Matrix& w, const RankSpec& spec,
                                        double tolerance = 1e-12,
                                        std::size_t max_iterations = 1000000) {
    spec.validate();
    const std::size_t v = w.rows();
    if (v == 0 || w.cols() != v) throw ParamError("katz_centrality: square matrix required");
    for (std::size_t r = 0; r < v; ++r)
        for (std::size_t c = 0; c < v; ++c)
            if (w(r, c) < 0.0) throw ParamError("katz_centrality: negative entry");

    const double lambda = spectral_radius(w);
    constexpr double kNilpotentTolerance = 1e-14;
    const double alpha = lambda > kNilpotentTolerance
                             ? spec.katz_alpha_fraction / lambda
                             : spec.katz_alpha_fraction;
    if (lambda > kNilpotentTolerance && alpha >= 1.0 / lambda)
        throw ParamError("katz_centrality: attenuation reaches the divergence bound");

    std::vector<double> c(v, 0.0);
    std::size_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        std::vector<double> shifted(v);
        for (std::size_t i = 0; i < v; ++i) shifted[i] = c[i] + 1.0;
        auto next = multiply(w, shifted);
        for (auto& value : next) value *= alpha;
        const double change = l1_distance(next, c);
        c = std::move(next);
        if (change < tolerance * std::max(1.0, l1_norm(c))) break;
        if (iter + 1 == max_iterations)
            throw NumericalError("katz_centrality: walk series did not converge");
    }

    CentralityScores result;
    result.method = RankMethod::katz;
    result.lambda_max = lambda;
    result.iterations = iter + 1;
    const double total = l1_norm(c);
    if (total == 0.0) {
        result.scores.assign(v, 1.0 / static_cast<double>(v));
    } else {
        for (auto& value : c) value /= total;
        result.scores = std::move(c);
    }
    return result;
}

}  // namespace faultrank
