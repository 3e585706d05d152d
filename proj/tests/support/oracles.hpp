#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately brute-force and shares no code with the library paths it
// checks.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "faultrank/matrix.hpp"
#include "faultrank/rng.hpp"

namespace oracles {

/// Naive O(n^2) discrete Fourier transform.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

inline double max_norm(const double* a, const double* b, std::size_t d) {
    double m = 0.0;
    for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

/// Brute-force fixed-radius count with index-band exclusion.
inline std::size_t brute_count_within(const std::vector<double>& pts, std::size_t n,
                                      std::size_t d, const double* q, double r, bool strict,
                                      std::ptrdiff_t excl_lo, std::ptrdiff_t excl_hi) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (idx >= excl_lo && idx <= excl_hi) continue;
        const double dist = max_norm(q, pts.data() + i * d, d);
        if (strict ? dist < r : dist <= r) ++count;
    }
    return count;
}

/// Brute-force k-th nearest neighbour distance with index-band exclusion.
inline double brute_kth_distance(const std::vector<double>& pts, std::size_t n, std::size_t d,
                                 const double* q, std::size_t k, std::ptrdiff_t excl_lo,
                                 std::ptrdiff_t excl_hi) {
    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (idx >= excl_lo && idx <= excl_hi) continue;
        dists.push_back(max_norm(q, pts.data() + i * d, d));
    }
    if (dists.size() < k) return std::numeric_limits<double>::infinity();
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     dists.end());
    return dists[k - 1];
}

/// Ordinary least squares residual variance of y on the given regressor
/// columns (intercept included), via normal equations.
inline double ols_residual_variance(const std::vector<std::vector<double>>& regressors,
                                    const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t p = regressors.size() + 1;  // + intercept
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    const auto x_at = [&](std::size_t row, std::size_t col) {
        return col == 0 ? 1.0 : regressors[col - 1][row];
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += x_at(i, a) * y[i];
            for (std::size_t b = 0; b < p; ++b) xtx[a][b] += x_at(i, a) * x_at(i, b);
        }
    }
    // Gaussian elimination with partial pivoting.
    std::vector<double> beta = xty;
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(xtx[r][col]) > std::abs(xtx[pivot][col])) pivot = r;
        std::swap(xtx[col], xtx[pivot]);
        std::swap(beta[col], beta[pivot]);
        if (std::abs(xtx[col][col]) < 1e-12) throw std::runtime_error("singular design matrix");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = xtx[r][col] / xtx[col][col];
            for (std::size_t c = col; c < p; ++c) xtx[r][c] -= f * xtx[col][c];
            beta[r] -= f * beta[col];
        }
    }
    for (std::size_t a = 0; a < p; ++a) beta[a] /= xtx[a][a];

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < p; ++a) fit += beta[a] * x_at(i, a);
        rss += (y[i] - fit) * (y[i] - fit);
    }
    return rss / static_cast<double>(n);
}

/// Linear-Gaussian transfer entropy reference for a coupled pair:
/// 0.5 * ln(var(target_t | target_{t-1}) / var(target_t | target_{t-1}, source_{t-d})).
inline double linear_gaussian_te(const std::vector<double>& source,
                                 const std::vector<double>& target, int delay) {
    const std::size_t n = target.size();
    const auto start = static_cast<std::size_t>(std::max(delay, 1));
    std::vector<double> y, y_past, x_lag;
    for (std::size_t t = start; t < n; ++t) {
        y.push_back(target[t]);
        y_past.push_back(target[t - 1]);
        x_lag.push_back(source[t - static_cast<std::size_t>(delay)]);
    }
    const double reduced = ols_residual_variance({y_past}, y);
    const double full = ols_residual_variance({y_past, x_lag}, y);
    return 0.5 * std::log(reduced / full);
}

/// Occupancy distribution of a long random walk driven by the row-stochastic
/// transition matrix; the Markov-chain reading of eigenvector centrality.
inline std::vector<double> random_walk_occupancy(const faultrank::Matrix& transition,
                                                 std::size_t steps, std::uint64_t seed) {
    const std::size_t v = transition.rows();
    std::vector<double> occupancy(v, 0.0);
    faultrank::Rng rng(seed);
    std::size_t node = 0;
    for (std::size_t s = 0; s < steps; ++s) {
        occupancy[node] += 1.0;
        const double u = rng.uniform01();
        double cum = 0.0;
        std::size_t next = v - 1;
        for (std::size_t j = 0; j < v; ++j) {
            cum += transition(node, j);
            if (u < cum) {
                next = j;
                break;
            }
        }
        node = next;
    }
    for (auto& x : occupancy) x /= static_cast<double>(steps);
    return occupancy;
}

}  // namespace oracles
