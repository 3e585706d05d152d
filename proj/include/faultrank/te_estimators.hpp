#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "faultrank/embedding.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/kdtree.hpp"
#include "faultrank/math_util.hpp"
#include "faultrank/rng.hpp"

namespace faultrank {

enum class EstimatorKind { kernel, ksg };

inline std::string to_string(EstimatorKind kind) {
    return kind == EstimatorKind::kernel ? "kernel" : "ksg";
}

struct TEEstimate {
    double value_nats = 0.0;
    EstimatorKind estimator = EstimatorKind::ksg;
    std::size_t n_effective = 0;
    double bandwidth = 0.0;      // kernel runs
    int k_neighbours = 0;        // ksg runs
    int theiler_window = 0;
};

/// Box-kernel plug-in estimate of lag-h transfer entropy in nats.
///
/// Each evaluation point contributes the log ratio of the two conditional
/// probabilities estimated by fixed-bandwidth max-norm box counts. Points
/// within `theiler_window` samples of the evaluation index are excluded from
/// every count (dynamic correlation exclusion). Evaluation points where any
/// count is zero carry no usable ratio and are skipped; if fewer than half
/// the points remain the estimate is rejected as unreliable.
inline TEEstimate te_kernel(const std::vector<double>& source,
                            const std::vector<double>& target,
                            const EmbeddingSpec& spec, double bandwidth,
                            int theiler_window = 10) {
    if (!(bandwidth > 0.0)) throw ParamError("te_kernel: bandwidth must be positive");
    if (theiler_window < 0) throw ParamError("te_kernel: theiler_window must be >= 0");
    const auto js = detail::assemble_joint(source, target, spec);
    const int k = js.k, l = js.l;

    const KdTree tree_cond(js.cond.data(), js.n, static_cast<std::size_t>(k));
    const KdTree tree_fut_cond(js.fut_cond.data(), js.n, static_cast<std::size_t>(1 + k));
    const KdTree tree_cond_src(js.cond_src.data(), js.n, static_cast<std::size_t>(k + l));
    const KdTree tree_full(js.full.data(), js.n, static_cast<std::size_t>(1 + k + l));

    double sum = 0.0;
    std::size_t usable = 0;
    for (std::size_t i = 0; i < js.n; ++i) {
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i) - theiler_window;
        const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i) + theiler_window;
        const std::size_t c_cond =
            tree_cond.count_within(js.cond.data() + i * static_cast<std::size_t>(k),
                                   bandwidth, false, lo, hi);
        if (c_cond == 0) continue;
        const std::size_t c_cond_src =
            tree_cond_src.count_within(js.cond_src.data() + i * static_cast<std::size_t>(k + l),
                                       bandwidth, false, lo, hi);
        if (c_cond_src == 0) continue;
        const std::size_t c_fut_cond =
            tree_fut_cond.count_within(js.fut_cond.data() + i * static_cast<std::size_t>(1 + k),
                                       bandwidth, false, lo, hi);
        if (c_fut_cond == 0) continue;
        const std::size_t c_full =
            tree_full.count_within(js.full.data() + i * static_cast<std::size_t>(1 + k + l),
                                   bandwidth, false, lo, hi);
        if (c_full == 0) continue;
        sum += std::log((static_cast<double>(c_full) * static_cast<double>(c_cond)) /
                        (static_cast<double>(c_cond_src) * static_cast<double>(c_fut_cond)));
        ++usable;
    }
    if (usable * 2 < js.n)
        throw EstimateUnreliable("te_kernel: only " + std::to_string(usable) + " of " +
                                 std::to_string(js.n) + " evaluation points usable");

    TEEstimate est;
    est.value_nats = sum / static_cast<double>(usable);
    est.estimator = EstimatorKind::kernel;
    est.n_effective = usable;
    est.bandwidth = bandwidth;
    est.theiler_window = theiler_window;
    return est;
}

namespace detail {

inline void add_tie_noise(std::vector<double>& values, double amplitude, Rng& rng) {
    if (amplitude <= 0.0) return;
    for (auto& x : values) x += rng.uniform(-amplitude, amplitude);
}

}  // namespace detail

/// Kraskov-style k-NN estimate of lag-h transfer entropy in nats.
///
/// Transfer entropy is the conditional mutual information between the target
/// future and the source history given the target history; the fixed number
/// of neighbours is found in the full joint space and digamma-counted in the
/// marginal subspaces with strictly-smaller max-norm distances. A small
/// uniform tie-breaking noise is added first; the result is deterministic for
/// a fixed seed.
inline TEEstimate te_ksg(const std::vector<double>& source, const std::vector<double>& target,
                         const EmbeddingSpec& spec, int k_neighbours = 4,
                         int theiler_window = 10, double noise_amplitude = 1e-8,
                         std::uint64_t rng_seed = 1) {
    if (k_neighbours < 1) throw ParamError("te_ksg: k_neighbours must be >= 1");
    if (theiler_window < 0) throw ParamError("te_ksg: theiler_window must be >= 0");
    if (noise_amplitude < 0.0) throw ParamError("te_ksg: noise_amplitude must be >= 0");

    Rng rng(rng_seed);
    std::vector<double> src = source;
    std::vector<double> tgt = target;
    detail::add_tie_noise(src, noise_amplitude, rng);
    detail::add_tie_noise(tgt, noise_amplitude, rng);

    const auto js = detail::assemble_joint(src, tgt, spec);
    const int k = js.k, l = js.l;

    const KdTree tree_full(js.full.data(), js.n, static_cast<std::size_t>(1 + k + l));
    const KdTree tree_cond(js.cond.data(), js.n, static_cast<std::size_t>(k));
    const KdTree tree_fut_cond(js.fut_cond.data(), js.n, static_cast<std::size_t>(1 + k));
    const KdTree tree_cond_src(js.cond_src.data(), js.n, static_cast<std::size_t>(k + l));

    double sum = 0.0;
    for (std::size_t i = 0; i < js.n; ++i) {
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i) - theiler_window;
        const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i) + theiler_window;
        const double eps = tree_full.kth_distance(
            js.full.data() + i * static_cast<std::size_t>(1 + k + l),
            static_cast<std::size_t>(k_neighbours), lo, hi);
        if (!std::isfinite(eps))
            throw EstimateUnreliable("te_ksg: fewer than k neighbours outside the exclusion window");
        if (eps <= 0.0)
            throw EstimateUnreliable("te_ksg: duplicate joint states; increase noise_amplitude");
        const std::size_t n_cond =
            tree_cond.count_within(js.cond.data() + i * static_cast<std::size_t>(k),
                                   eps, true, lo, hi);
        const std::size_t n_fut_cond =
            tree_fut_cond.count_within(js.fut_cond.data() + i * static_cast<std::size_t>(1 + k),
                                       eps, true, lo, hi);
        const std::size_t n_cond_src =
            tree_cond_src.count_within(js.cond_src.data() + i * static_cast<std::size_t>(k + l),
                                       eps, true, lo, hi);
        sum += digamma(static_cast<double>(n_cond + 1)) -
               digamma(static_cast<double>(n_fut_cond + 1)) -
               digamma(static_cast<double>(n_cond_src + 1));
    }

    TEEstimate est;
    est.value_nats = digamma(static_cast<double>(k_neighbours)) +
                     sum / static_cast<double>(js.n);
    est.estimator = EstimatorKind::ksg;
    est.n_effective = js.n;
    est.k_neighbours = k_neighbours;
    est.theiler_window = theiler_window;
    return est;
}

/// Kraskov mutual information between paired state rows (a: n x da, b: n x db),
/// with temporal exclusion. Used by the embedding search.
inline double ksg_mutual_information(const std::vector<double>& a, std::size_t da,
                                     const std::vector<double>& b, std::size_t db,
                                     std::size_t n, int k_neighbours, int theiler_window) {
    if (n * da != a.size() || n * db != b.size())
        throw ParamError("ksg_mutual_information: shape mismatch");
    if (n < static_cast<std::size_t>(k_neighbours) + 2)
        throw EstimateUnreliable("ksg_mutual_information: too few points");
    std::vector<double> joint(n * (da + db));
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(a.data() + i * da, a.data() + (i + 1) * da, joint.data() + i * (da + db));
        std::copy(b.data() + i * db, b.data() + (i + 1) * db,
                  joint.data() + i * (da + db) + da);
    }
    const KdTree tree_joint(joint.data(), n, da + db);
    const KdTree tree_a(a.data(), n, da);
    const KdTree tree_b(b.data(), n, db);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i) - theiler_window;
        const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i) + theiler_window;
        const double eps = tree_joint.kth_distance(joint.data() + i * (da + db),
                                                   static_cast<std::size_t>(k_neighbours),
                                                   lo, hi);
        if (!std::isfinite(eps) || eps <= 0.0)
            throw EstimateUnreliable("ksg_mutual_information: degenerate neighbourhood");
        const std::size_t n_a = tree_a.count_within(a.data() + i * da, eps, true, lo, hi);
        const std::size_t n_b = tree_b.count_within(b.data() + i * db, eps, true, lo, hi);
        const std::ptrdiff_t excl_lo = std::max<std::ptrdiff_t>(0, lo);
        const std::ptrdiff_t excl_hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, hi);
        const std::size_t candidates = n - static_cast<std::size_t>(excl_hi - excl_lo + 1);
        sum += digamma(static_cast<double>(candidates)) -
               digamma(static_cast<double>(n_a + 1)) - digamma(static_cast<double>(n_b + 1));
    }
    return digamma(static_cast<double>(k_neighbours)) + sum / static_cast<double>(n);
}

struct KernelParams {
    double bandwidth = 0.3;
    int theiler_window = 10;
};

struct KsgParams {
    int k_neighbours = 4;
    int theiler_window = 10;
    double noise_amplitude = 1e-8;
};

/// Dispatching configuration shared by the sweep engine and the CLI.
struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::ksg;
    KernelParams kernel;
    KsgParams ksg;
    std::uint64_t rng_seed = 1;

    TEEstimate estimate(const std::vector<double>& source, const std::vector<double>& target,
                        const EmbeddingSpec& spec) const {
        if (kind == EstimatorKind::kernel)
            return te_kernel(source, target, spec, kernel.bandwidth, kernel.theiler_window);
        return te_ksg(source, target, spec, ksg.k_neighbours, ksg.theiler_window,
                      ksg.noise_amplitude, rng_seed);
    }
};

/// Net information flow: forward minus backward transfer entropy at the same
/// lag (source leads by h in the forward term, target leads by h in the
/// reverse term). Exactly antisymmetric under argument swap.
inline double te_directional(const std::vector<double>& source,
                             const std::vector<double>& target, const EmbeddingSpec& spec,
                             const EstimatorConfig& config) {
    const double forward = config.estimate(source, target, spec).value_nats;
    const double backward = config.estimate(target, source, spec).value_nats;
    return forward - backward;
}

struct AutoEmbedResult {
    int k_target = 1;
    int tau = 1;
    bool boundary = false;
    double corrected_ais = 0.0;  // bias-corrected active information storage, nats
};

/// Grid search for the target embedding that maximises bias-corrected active
/// information storage: the k-NN mutual information between the next sample
/// and the candidate state, minus the mean over shuffled surrogates. A
/// candidate only displaces a smaller one when it wins by more than
/// `tie_tolerance`, so featureless series resolve to the smallest state.
inline AutoEmbedResult auto_embed(const std::vector<double>& target,
                                  const std::vector<int>& candidate_ks,
                                  const std::vector<int>& candidate_taus,
                                  const KsgParams& params = {}, std::uint64_t rng_seed = 1,
                                  int n_surrogates = 5, double tie_tolerance = 0.02) {
    if (candidate_ks.empty() || candidate_taus.empty())
        throw ParamError("auto_embed: candidate ranges must be non-empty");

    std::vector<double> noisy = target;
    Rng noise_rng(rng_seed);
    detail::add_tie_noise(noisy, params.noise_amplitude, noise_rng);

    AutoEmbedResult best;
    bool have_best = false;
    std::size_t failures = 0, total = 0;
    for (int k : candidate_ks) {
        for (int tau : candidate_taus) {
            ++total;
            if (k < 1 || tau < 1) throw ParamError("auto_embed: candidates must be >= 1");
            double corrected;
            try {
                // Future sample aligned one step after the state's end index.
                const Matrix history = embed(noisy, k, tau, -1);
                const long offset = static_cast<long>(noisy.size()) -
                                    static_cast<long>(history.rows());
                std::vector<double> future(history.rows());
                for (std::size_t i = 0; i < history.rows(); ++i)
                    future[i] = noisy[static_cast<std::size_t>(offset) + i];
                const std::vector<double>& hist_flat = history.data();

                const double actual = ksg_mutual_information(
                    future, 1, hist_flat, static_cast<std::size_t>(k), history.rows(),
                    params.k_neighbours, params.theiler_window);
                double surrogate_sum = 0.0;
                for (int s = 0; s < n_surrogates; ++s) {
                    std::vector<double> shuffled = future;
                    Rng srng(Rng::derive(rng_seed, static_cast<std::uint64_t>(s)));
                    srng.shuffle(shuffled);
                    surrogate_sum += ksg_mutual_information(
                        shuffled, 1, hist_flat, static_cast<std::size_t>(k), history.rows(),
                        params.k_neighbours, params.theiler_window);
                }
                corrected = actual - surrogate_sum / static_cast<double>(n_surrogates);
            } catch (const EstimateUnreliable&) {
                ++failures;
                continue;
            }
            if (!have_best || corrected > best.corrected_ais + tie_tolerance) {
                best.k_target = k;
                best.tau = tau;
                best.corrected_ais = corrected;
                have_best = true;
            }
        }
    }
    if (!have_best || failures == total)
        throw EstimateUnreliable("auto_embed: no candidate produced a reliable estimate");

    const auto at_widenable_edge = [](int value, const std::vector<int>& range) {
        const auto [lo, hi] = std::minmax_element(range.begin(), range.end());
        return value == *hi || (value == *lo && *lo > 1);
    };
    best.boundary = at_widenable_edge(best.k_target, candidate_ks) ||
                    at_widenable_edge(best.tau, candidate_taus);
    return best;
}

}  // namespace faultrank
