#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "faultrank/centrality.hpp"
#include "faultrank/engine.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/parallel.hpp"
#include "faultrank/signal_store.hpp"

namespace faultrank {

struct WindowPlan {
    std::size_t window_samples = 0;
    double overlap_fraction = 0.0;
    std::vector<std::size_t> starts;

    std::size_t count() const { return starts.size(); }
};

/// Maximal list of evenly stepped window starts;
/// step = round(window * (1 - overlap)).
inline WindowPlan plan_windows(std::size_t total_samples, std::size_t window_samples,
                               double overlap_fraction) {
    if (window_samples < 1 || window_samples > total_samples)
        throw ParamError("plan_windows: window must fit the series");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw ParamError("plan_windows: overlap must be in [0, 1)");
    const auto step = static_cast<std::size_t>(
        std::llround(static_cast<double>(window_samples) * (1.0 - overlap_fraction)));
    if (step < 1) throw ParamError("plan_windows: overlap leaves a step below one sample");
    WindowPlan plan;
    plan.window_samples = window_samples;
    plan.overlap_fraction = overlap_fraction;
    for (std::size_t start = 0; start + window_samples <= total_samples; start += step)
        plan.starts.push_back(start);
    return plan;
}

/// Rolling-window monitoring matrix: per-window node importance over the full
/// tag list. Rows are L1-normalised; tags constant-filtered out of a window
/// score zero there.
struct MTRResult {
    std::vector<double> window_mid_times;  // seconds
    std::vector<std::string> tags;
    Matrix scores;  // windows x tags
    std::vector<bool> degenerate;  // window had < 2 usable tags; row left uniform
    std::string config_fingerprint;
};

/// Runs the per-window pipeline (constant filter, ITN build, reset-mixed
/// eigenvector ranking) over every planned window. Windows are independent
/// and processed in parallel; each window's engine then runs single-threaded
/// so results do not depend on the worker split.
inline MTRResult mtr_rank(const TimeSeriesSet& ts, const WindowPlan& plan,
                          const DelaySweepSpec& sweep, const RankSpec& rank,
                          double constant_filter_tolerance = kConstantTolerance) {
    if (ts.scaling_state == ScalingState::raw)
        throw ParamError("mtr_rank: scale the data first");
    if (plan.starts.empty()) throw ParamError("mtr_rank: empty window plan");
    for (std::size_t start : plan.starts)
        if (start + plan.window_samples > ts.n_samples())
            throw ParamError("mtr_rank: window plan does not fit the series");
    rank.validate();

    const std::size_t v = ts.n_tags();
    MTRResult result;
    for (const auto& tag : ts.tags) result.tags.push_back(tag.name);
    result.window_mid_times.resize(plan.count());
    result.scores = Matrix(plan.count(), v, 0.0);
    result.degenerate.assign(plan.count(), false);

    DelaySweepSpec window_sweep = sweep;
    window_sweep.workers = 1;

    parallel_for(plan.count(), sweep.workers, [&](std::size_t w) {
        const std::size_t start = plan.starts[w];
        result.window_mid_times[w] =
            ts.start_time +
            (static_cast<double>(start) +
             static_cast<double>(plan.window_samples - 1) / 2.0) *
                ts.sample_period;
        const TimeSeriesSet slice = window(ts, start, plan.window_samples);

        std::vector<std::string> surviving;
        CentralityScores scores;
        try {
            FilterResult filtered = filter_constant(slice, constant_filter_tolerance);
            if (filtered.set.n_tags() < 2) throw EmptySetError("single tag");
            auto [graph, edges] = build_itn(filtered.set, window_sweep);
            const Matrix mixed = mix_with_reset(graph.weights, rank);
            scores = eigenvector_centrality(mixed, rank);
            for (const auto& tag : filtered.set.tags) surviving.push_back(tag.name);
        } catch (const EmptySetError&) {
            result.degenerate[w] = true;
            for (std::size_t c = 0; c < v; ++c)
                result.scores(w, c) = 1.0 / static_cast<double>(v);
            return;
        }
        for (std::size_t j = 0; j < surviving.size(); ++j) {
            const std::size_t column = ts.tag_index(surviving[j]);
            result.scores(w, column) = scores.scores[j];
        }
    });
    return result;
}

/// `window_mid_time,<tag1>,<tag2>,...` rows, bit-stable for fixed inputs.
inline void export_mtr_csv(const MTRResult& result, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << "window_mid_time";
    for (const auto& tag : result.tags) file << ',' << tag;
    file << '\n';
    char buf[64];
    for (std::size_t w = 0; w < result.scores.rows(); ++w) {
        std::snprintf(buf, sizeof(buf), "%.12g", result.window_mid_times[w]);
        file << buf;
        for (std::size_t c = 0; c < result.scores.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", result.scores(w, c));
            file << ',' << buf;
        }
        file << '\n';
    }
    if (!file) throw IOError("write failed for '" + path + "'");
}

}  // namespace faultrank
