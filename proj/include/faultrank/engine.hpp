#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "faultrank/centrality.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/parallel.hpp"
#include "faultrank/signal_store.hpp"
#include "faultrank/surrogates.hpp"
#include "faultrank/te_estimators.hpp"

namespace faultrank {

enum class WeightKind { simple, directional };

inline std::string to_string(WeightKind k) {
    return k == WeightKind::simple ? "simple" : "directional";
}

/// Per-pair analysis plan: which lags to sweep and which admission tests to
/// run on the optimising lag.
struct DelaySweepSpec {
    std::vector<int> delays;  // samples, strictly increasing, >= 0
    bool bidirectional = false;
    EstimatorConfig estimator;
    WeightKind weight_kind = WeightKind::simple;
    EmbeddingSpec embedding;  // h is overwritten per swept delay
    std::optional<SurrogatePolicy> surrogate_policy;
    std::optional<DirectionalityMode> directionality_mode;
    unsigned workers = 0;

    /// One lag per sample from zero out to `min_span_seconds`.
    static std::vector<int> default_delays(double sample_period, double min_span_seconds = 300.0) {
        if (!(sample_period > 0.0)) throw ParamError("delays: sample period must be positive");
        const int max_delay = static_cast<int>(std::ceil(min_span_seconds / sample_period));
        std::vector<int> delays(static_cast<std::size_t>(max_delay) + 1);
        for (int d = 0; d <= max_delay; ++d) delays[static_cast<std::size_t>(d)] = d;
        return delays;
    }

    bool needs_backward_sweep() const {
        return bidirectional || directionality_mode.has_value() ||
               weight_kind == WeightKind::directional;
    }

    void validate() const {
        if (delays.empty()) throw ParamError("delays: list must be non-empty");
        for (std::size_t i = 0; i < delays.size(); ++i) {
            if (delays[i] < 0) throw ParamError("delays: lags must be >= 0");
            if (i > 0 && delays[i] <= delays[i - 1])
                throw ParamError("delays: lags must be strictly increasing");
        }
    }
};

/// Compact one-line summary recorded as the configuration fingerprint of
/// derived artifacts.
inline std::string describe(const DelaySweepSpec& spec) {
    std::string out = "estimator=" + to_string(spec.estimator.kind);
    if (spec.estimator.kind == EstimatorKind::kernel) {
        out += ";bandwidth=" + std::to_string(spec.estimator.kernel.bandwidth) +
               ";theiler=" + std::to_string(spec.estimator.kernel.theiler_window);
    } else {
        out += ";k=" + std::to_string(spec.estimator.ksg.k_neighbours) +
               ";theiler=" + std::to_string(spec.estimator.ksg.theiler_window) +
               ";noise=" + std::to_string(spec.estimator.ksg.noise_amplitude);
    }
    out += ";seed=" + std::to_string(spec.estimator.rng_seed);
    out += ";embedding=k" + std::to_string(spec.embedding.k_target) + "l" +
           std::to_string(spec.embedding.l_source) + "tau" + std::to_string(spec.embedding.tau);
    out += ";delays=" + std::to_string(spec.delays.front()) + ".." +
           std::to_string(spec.delays.back()) + "(" + std::to_string(spec.delays.size()) + ")";
    out += ";weights=" + to_string(spec.weight_kind);
    out += ";surrogates=";
    out += spec.surrogate_policy
               ? to_string(spec.surrogate_policy->method) + "x" +
                     std::to_string(spec.surrogate_policy->count)
               : "off";
    out += ";directionality=";
    if (!spec.directionality_mode) out += "off";
    else if (*spec.directionality_mode == DirectionalityMode::corrected) out += "corrected";
    else out += "paper_literal";
    return out;
}

enum class TestOutcome { not_tested, passed, failed };

inline std::string to_string(TestOutcome o) {
    switch (o) {
        case TestOutcome::passed: return "true";
        case TestOutcome::failed: return "false";
        case TestOutcome::not_tested: return "not_tested";
    }
    return "not_tested";
}

struct EdgeResult {
    std::string source;
    std::string target;
    double te_max = 0.0;      // peak sweep value (psi)
    int delay_opt = 0;        // optimising lag in samples (delta)
    double weight = 0.0;
    TestOutcome passed_magnitude = TestOutcome::not_tested;
    TestOutcome passed_direction = TestOutcome::not_tested;
    bool boundary_flag = false;
    bool estimate_failed = false;  // every swept lag failed; weight forced to 0
};

/// Information-transfer network: entry (i, j) is the admitted influence of
/// source j on sink i (sources along columns, sinks along rows).
struct WeightedDigraph {
    std::vector<std::string> tags;
    Matrix weights;
    std::string config_fingerprint;
};

/// One estimate per swept lag. Lags where the estimator rejects the data are
/// reported as missing rather than aborting the sweep.
inline std::vector<std::pair<int, std::optional<double>>> sweep_delays(
    const std::vector<double>& source, const std::vector<double>& target,
    const DelaySweepSpec& spec) {
    spec.validate();
    std::vector<std::pair<int, std::optional<double>>> profile;
    profile.reserve(spec.delays.size());
    for (int delay : spec.delays) {
        EmbeddingSpec embedding = spec.embedding;
        embedding.h = delay;
        try {
            profile.emplace_back(delay,
                                 spec.estimator.estimate(source, target, embedding).value_nats);
        } catch (const Error&) {
            profile.emplace_back(delay, std::nullopt);
        }
    }
    return profile;
}

struct BestDelay {
    double psi = 0.0;
    int delta = 0;
    bool boundary = false;
};

/// Peak of a sweep profile; ties resolve to the smallest lag and the boundary
/// flag marks an optimum at either end of the searched range.
inline BestDelay best_delay(const std::vector<std::pair<int, std::optional<double>>>& profile) {
    if (profile.empty()) throw ParamError("best_delay: empty profile");
    BestDelay best;
    bool found = false;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (!profile[i].second) continue;
        const double value = *profile[i].second;
        if (!found || value > best.psi) {
            best.psi = value;
            best.delta = profile[i].first;
            best_index = i;
            found = true;
        }
    }
    if (!found) throw EstimateUnreliable("best_delay: every lag in the sweep failed");
    best.boundary = best_index == 0 || best_index + 1 == profile.size();
    return best;
}

namespace detail {

struct DirectedSweep {
    bool ok = false;
    BestDelay best;
    std::vector<std::pair<int, std::optional<double>>> profile;
};

inline DirectedSweep run_directed_sweep(const std::vector<double>& source,
                                        const std::vector<double>& target,
                                        const DelaySweepSpec& spec, std::uint64_t seed) {
    DelaySweepSpec local = spec;
    local.estimator.rng_seed = seed;
    DirectedSweep sweep;
    sweep.profile = sweep_delays(source, target, local);
    try {
        sweep.best = best_delay(sweep.profile);
        sweep.ok = true;
    } catch (const EstimateUnreliable&) {
        sweep.ok = false;
    }
    return sweep;
}

inline std::optional<double> profile_value_at(
    const std::vector<std::pair<int, std::optional<double>>>& profile, int delay) {
    for (const auto& [d, value] : profile)
        if (d == delay) return value;
    return std::nullopt;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Seed for a directed pair, derived from the tag names so a pair's result is
/// identical whether it is computed alone or inside a larger network.
inline std::uint64_t pair_seed(std::uint64_t base, const std::string& source,
                               const std::string& target) {
    return Rng::derive(Rng::derive(base, fnv1a(source)), fnv1a(target));
}

}  // namespace detail

/// Builds the ITN over every ordered tag pair. Bivariate sweeps are
/// independent, so pairs run in parallel with per-pair derived seeds;
/// indirect influence paths are deliberately kept (aggregate ranking absorbs
/// them) and only the configured admission tests zero an edge.
inline std::pair<WeightedDigraph, std::vector<EdgeResult>> build_itn(
    const TimeSeriesSet& ts, const DelaySweepSpec& spec) {
    spec.validate();
    if (ts.scaling_state == ScalingState::raw)
        throw ParamError("build_itn: scale the data first");
    const std::size_t v = ts.n_tags();
    if (v < 2) throw EmptySetError("build_itn: need at least 2 tags");

    std::vector<std::vector<double>> columns(v);
    for (std::size_t c = 0; c < v; ++c) columns[c] = ts.values.column(c);

    // Directed sweep per ordered pair; the reverse pair's sweep doubles as
    // this pair's backward evidence.
    struct PairTask {
        std::size_t source = 0, sink = 0;
    };
    std::vector<PairTask> tasks;
    tasks.reserve(v * (v - 1));
    for (std::size_t source = 0; source < v; ++source)
        for (std::size_t sink = 0; sink < v; ++sink)
            if (source != sink) tasks.push_back({source, sink});

    std::vector<detail::DirectedSweep> sweeps(tasks.size());
    parallel_for(tasks.size(), spec.workers, [&](std::size_t i) {
        const auto& task = tasks[i];
        const std::uint64_t seed = detail::pair_seed(
            spec.estimator.rng_seed, ts.tags[task.source].name, ts.tags[task.sink].name);
        sweeps[i] = detail::run_directed_sweep(columns[task.source], columns[task.sink],
                                               spec, seed);
    });

    std::vector<std::size_t> task_index(v * v, tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i)
        task_index[tasks[i].source * v + tasks[i].sink] = i;

    // Surrogate magnitude tests, evaluated at each pair's optimising lag.
    std::vector<TestOutcome> magnitude(tasks.size(), TestOutcome::not_tested);
    if (spec.surrogate_policy) {
        const SurrogatePolicy policy = *spec.surrogate_policy;
        parallel_for(tasks.size(), spec.workers, [&](std::size_t i) {
            if (!sweeps[i].ok) return;
            const auto& task = tasks[i];
            EmbeddingSpec embedding = spec.embedding;
            embedding.h = sweeps[i].best.delta;
            EstimatorConfig estimator = spec.estimator;
            estimator.rng_seed = detail::pair_seed(
                spec.estimator.rng_seed, ts.tags[task.source].name, ts.tags[task.sink].name);
            const std::uint64_t base = detail::pair_seed(
                policy.rng_seed, ts.tags[task.source].name, ts.tags[task.sink].name);
            std::vector<double> surrogate_values;
            surrogate_values.reserve(static_cast<std::size_t>(policy.count));
            for (int s = 0; s < policy.count; ++s) {
                const std::uint64_t seed = base + static_cast<std::uint64_t>(s);
                const std::vector<double> surrogate =
                    policy.method == SurrogateMethod::shuffle
                        ? surrogate_shuffle(columns[task.source], seed)
                        : surrogate_iaaft(columns[task.source], policy.iaaft_iterations, seed);
                try {
                    surrogate_values.push_back(
                        estimator.estimate(surrogate, columns[task.sink], embedding).value_nats);
                } catch (const Error&) {
                    // A failed surrogate estimate cannot support admission.
                    surrogate_values.push_back(std::numeric_limits<double>::infinity());
                }
            }
            magnitude[i] = rank_order_test(sweeps[i].best.psi, surrogate_values)
                               ? TestOutcome::passed
                               : TestOutcome::failed;
        });
    }

    WeightedDigraph graph;
    for (const auto& tag : ts.tags) graph.tags.push_back(tag.name);
    graph.weights = Matrix(v, v, 0.0);
    graph.config_fingerprint = describe(spec);
    std::vector<EdgeResult> edges;
    edges.reserve(tasks.size());

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& task = tasks[i];
        EdgeResult edge;
        edge.source = ts.tags[task.source].name;
        edge.target = ts.tags[task.sink].name;
        if (!sweeps[i].ok) {
            edge.estimate_failed = true;
            edge.delay_opt = spec.delays.front();
            edges.push_back(std::move(edge));
            continue;
        }
        edge.te_max = sweeps[i].best.psi;
        edge.delay_opt = sweeps[i].best.delta;
        edge.boundary_flag = sweeps[i].best.boundary;
        edge.passed_magnitude = magnitude[i];

        const std::size_t reverse = task_index[task.sink * v + task.source];
        const detail::DirectedSweep& backward = sweeps[reverse];

        if (spec.directionality_mode) {
            if (backward.ok) {
                DirectionalityEvidence evidence;
                evidence.psi_forward = sweeps[i].best.psi;
                evidence.delta_forward = sweeps[i].best.delta;
                evidence.psi_backward = backward.best.psi;
                evidence.delta_backward = backward.best.delta;
                edge.passed_direction =
                    directionality_test(evidence, *spec.directionality_mode)
                        ? TestOutcome::passed
                        : TestOutcome::failed;
            } else {
                // No backward evidence: nothing contradicts the forward peak.
                edge.passed_direction = TestOutcome::passed;
            }
        }

        double weight = edge.te_max;
        if (spec.weight_kind == WeightKind::directional) {
            const auto reverse_at_delta =
                backward.ok ? detail::profile_value_at(backward.profile, edge.delay_opt)
                            : std::nullopt;
            weight = edge.te_max - reverse_at_delta.value_or(0.0);
        }
        if (edge.passed_magnitude == TestOutcome::failed ||
            edge.passed_direction == TestOutcome::failed)
            weight = 0.0;
        edge.weight = std::max(weight, 0.0);
        graph.weights(task.sink, task.source) = edge.weight;
        edges.push_back(std::move(edge));
    }
    return {std::move(graph), std::move(edges)};
}

}  // namespace faultrank
