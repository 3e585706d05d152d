#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "faultrank/errors.hpp"
#include "faultrank/fft.hpp"
#include "faultrank/rng.hpp"

namespace faultrank {

enum class SurrogateMethod { shuffle, iaaft };

inline std::string to_string(SurrogateMethod m) {
    return m == SurrogateMethod::shuffle ? "shuffle" : "iaaft";
}

/// Surrogate-count/alpha pairing for the one-sided rank-order test:
/// count = 1/alpha - 1 surrogates give a false-rejection probability alpha.
struct SurrogatePolicy {
    SurrogateMethod method = SurrogateMethod::iaaft;
    int count = 19;
    double alpha = 0.05;
    int iaaft_iterations = 100;
    std::uint64_t rng_seed = 1;

    static SurrogatePolicy from_alpha(double alpha, SurrogateMethod method,
                                      std::uint64_t rng_seed = 1) {
        if (!(alpha > 0.0 && alpha <= 0.5))
            throw ParamError("surrogates: alpha must be in (0, 0.5]");
        SurrogatePolicy policy;
        policy.method = method;
        policy.alpha = alpha;
        policy.count = static_cast<int>(std::lround(1.0 / alpha)) - 1;
        policy.rng_seed = rng_seed;
        return policy;
    }
};

/// Uniform random permutation of the series; preserves the value multiset
/// exactly and destroys all temporal structure.
inline std::vector<double> surrogate_shuffle(const std::vector<double>& series,
                                             std::uint64_t rng_seed) {
    if (series.size() < 2) throw ParamError("surrogate_shuffle: need at least 2 samples");
    std::vector<double> out = series;
    Rng rng(rng_seed);
    rng.shuffle(out);
    return out;
}

/// Iterative amplitude-adjusted Fourier-transform surrogate: alternately
/// imposes the original amplitude spectrum and rank-remaps onto the original
/// value distribution, so the sorted output equals the sorted input exactly
/// while the power spectrum is approximately preserved. Stops early once the
/// rank ordering is stable between rounds.
inline std::vector<double> surrogate_iaaft(const std::vector<double>& series, int iterations,
                                           std::uint64_t rng_seed) {
    const std::size_t n = series.size();
    if (n < 8) throw ParamError("surrogate_iaaft: need at least 8 samples");
    if (iterations < 1) throw ParamError("surrogate_iaaft: iterations must be >= 1");

    std::vector<double> sorted_values = series;
    std::sort(sorted_values.begin(), sorted_values.end());
    const auto target_amplitude = amplitude_spectrum(series);

    std::vector<double> current = series;
    Rng rng(rng_seed);
    rng.shuffle(current);

    std::vector<std::size_t> ranks(n), previous_ranks;
    for (int round = 0; round < iterations; ++round) {
        // Impose the target amplitude spectrum, keeping the current phases.
        auto spectrum = fft_real(current);
        for (std::size_t k = 0; k < n; ++k) {
            const double mag = std::abs(spectrum[k]);
            spectrum[k] = mag > 0.0 ? spectrum[k] * (target_amplitude[k] / mag)
                                    : std::complex<double>(target_amplitude[k], 0.0);
        }
        const auto filtered = fft(std::move(spectrum), true);

        // Rank-remap onto the original amplitude distribution.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return filtered[a].real() < filtered[b].real();
        });
        for (std::size_t r = 0; r < n; ++r) {
            current[order[r]] = sorted_values[r];
            ranks[order[r]] = r;
        }
        if (ranks == previous_ranks) break;
        previous_ranks = ranks;
    }
    return current;
}

/// One-sided rank-order admission: the measured value must strictly exceed
/// every surrogate value.
inline bool rank_order_test(double te_actual, const std::vector<double>& te_surrogates) {
    if (te_surrogates.empty()) throw ParamError("rank_order_test: no surrogate values");
    return std::all_of(te_surrogates.begin(), te_surrogates.end(),
                       [&](double s) { return te_actual > s; });
}

/// Peak values and optimising lags of the forward (source leads) and backward
/// (target leads) delay sweeps of a directed pair.
struct DirectionalityEvidence {
    double psi_forward = 0.0;
    int delta_forward = 0;
    double psi_backward = 0.0;
    int delta_backward = 0;
};

enum class DirectionalityMode { paper_literal, corrected };

/// Directional admission for a candidate edge. The `corrected` mode requires
/// the forward sweep to dominate (larger peak, or an earlier optimising lag);
/// `paper_literal` evaluates the mirrored condition for comparison runs.
inline bool directionality_test(const DirectionalityEvidence& e,
                                DirectionalityMode mode = DirectionalityMode::corrected) {
    if (!std::isfinite(e.psi_forward) || !std::isfinite(e.psi_backward))
        throw ParamError("directionality_test: non-finite evidence");
    if (mode == DirectionalityMode::paper_literal)
        return e.psi_backward > e.psi_forward || e.delta_backward < e.delta_forward;
    return e.psi_forward > e.psi_backward || e.delta_forward < e.delta_backward;
}

}  // namespace faultrank
