#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "faultrank/config.hpp"
#include "faultrank/engine.hpp"
#include "faultrank/math_util.hpp"
#include "faultrank/mtr.hpp"
#include "faultrank/report.hpp"
#include "faultrank/signal_store.hpp"
#include "faultrank/te_estimators.hpp"

namespace faultrank {

/// Ingests, optionally subsamples/slices, scales and constant-filters the
/// configured dataset; shared front end of every subcommand.
inline TimeSeriesSet prepare_data(const RunConfig& cfg, std::vector<std::string>* removed = nullptr) {
    if (cfg.data_path.empty()) throw ConfigError("config: 'data' is required");
    TimeSeriesSet ts = load_csv(cfg.data_path);
    if (!cfg.tag_metadata_path.empty())
        ts = apply_tag_metadata(ts, load_tag_metadata(cfg.tag_metadata_path));
    if (cfg.subsample_factor > 1) ts = subsample(ts, cfg.subsample_factor);
    if (cfg.slice) ts = window(ts, cfg.slice->first, cfg.slice->second);
    ts = cfg.scaling == ScalingChoice::standardise ? standardise(ts) : limit_scale(ts);
    FilterResult filtered = filter_constant(ts, cfg.constant_filter_tolerance);
    if (removed) *removed = filtered.removed;
    return std::move(filtered.set);
}

/// Sweep plan implied by the config for a given sample period, including the
/// automatic target-embedding search when enabled.
inline DelaySweepSpec make_sweep_spec(const RunConfig& cfg, const TimeSeriesSet& ts) {
    DelaySweepSpec spec;
    spec.delays = cfg.delays_samples.empty()
                      ? DelaySweepSpec::default_delays(ts.sample_period, cfg.delay_span_seconds)
                      : cfg.delays_samples;
    spec.estimator = cfg.estimator;
    spec.estimator.rng_seed = cfg.rng_seed;
    spec.weight_kind = cfg.weight_kind;
    spec.embedding = cfg.embedding;
    spec.directionality_mode = cfg.directionality;
    spec.bidirectional = spec.needs_backward_sweep();
    spec.surrogate_policy = cfg.surrogates;
    if (spec.surrogate_policy) spec.surrogate_policy->rng_seed = cfg.rng_seed;
    spec.workers = cfg.workers;
    return spec;
}

struct AnalyseResult {
    TimeSeriesSet data;  // scaled, filtered
    std::vector<std::string> removed_tags;
    WeightedDigraph graph;
    std::vector<EdgeResult> edges;
    CentralityScores scores;
};

/// Embedding search over each tag used as a target, keeping the largest
/// selection so one sweep spec covers every pair.
inline EmbeddingSpec resolve_auto_embedding(const RunConfig& cfg, const TimeSeriesSet& ts) {
    std::vector<int> ks(static_cast<std::size_t>(cfg.auto_max_k));
    std::vector<int> taus(static_cast<std::size_t>(cfg.auto_max_tau));
    for (int i = 0; i < cfg.auto_max_k; ++i) ks[static_cast<std::size_t>(i)] = i + 1;
    for (int i = 0; i < cfg.auto_max_tau; ++i) taus[static_cast<std::size_t>(i)] = i + 1;
    EmbeddingSpec embedding = cfg.embedding;
    double best_ais = -1.0;
    for (std::size_t c = 0; c < ts.n_tags(); ++c) {
        const auto result = auto_embed(ts.values.column(c), ks, taus, cfg.estimator.ksg,
                                       Rng::derive(cfg.rng_seed, c));
        if (result.corrected_ais > best_ais) {
            best_ais = result.corrected_ais;
            embedding.k_target = result.k_target;
            embedding.tau = result.tau;
        }
    }
    return embedding;
}

inline AnalyseResult run_analyse(const RunConfig& cfg) {
    AnalyseResult result;
    result.data = prepare_data(cfg, &result.removed_tags);
    RunConfig effective = cfg;
    if (cfg.auto_embedding)
        effective.embedding = resolve_auto_embedding(cfg, result.data);
    const DelaySweepSpec spec = make_sweep_spec(effective, result.data);
    auto [graph, edges] = build_itn(result.data, spec);
    result.graph = std::move(graph);
    result.edges = std::move(edges);
    if (cfg.rank_method == RankMethod::eigenvector) {
        const Matrix mixed = mix_with_reset(result.graph.weights, cfg.rank);
        result.scores = eigenvector_centrality(mixed, cfg.rank);
    } else {
        result.scores = katz_centrality(transpose(result.graph.weights), cfg.rank);
    }
    return result;
}

inline void write_analyse_outputs(const RunConfig& cfg, const AnalyseResult& result,
                                  double gml_percentile = 0.0) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const auto out = [&](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };
    write_edge_csv(result.edges, result.data.sample_period, out("edges.csv"));
    write_ranking_csv(result.data.tags, result.scores.scores, out("ranking.csv"));
    write_gml(result.graph.tags, result.scores.scores, result.edges,
              result.data.sample_period, out("itn.gml"), gml_percentile);
}

struct MtrRunResult {
    TimeSeriesSet data;
    MTRResult mtr;
};

inline MtrRunResult run_mtr(const RunConfig& cfg) {
    if (cfg.window_samples == 0)
        throw ConfigError("config: 'window.samples' is required for mtr runs");
    MtrRunResult result;
    result.data = prepare_data(cfg, nullptr);
    RunConfig effective = cfg;
    if (cfg.auto_embedding)
        effective.embedding = resolve_auto_embedding(cfg, result.data);
    const DelaySweepSpec spec = make_sweep_spec(effective, result.data);
    const WindowPlan plan =
        plan_windows(result.data.n_samples(), cfg.window_samples, cfg.window_overlap);
    result.mtr = mtr_rank(result.data, plan, spec, cfg.rank, cfg.constant_filter_tolerance);
    result.mtr.config_fingerprint = describe(spec);
    return result;
}

inline void write_mtr_outputs(const RunConfig& cfg, const MtrRunResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    export_mtr_csv(result.mtr, (fs::path(cfg.output_dir) / "mtr.csv").string());
    if (cfg.window_rankings) {
        for (std::size_t w = 0; w < result.mtr.scores.rows(); ++w) {
            std::vector<double> scores(result.mtr.scores.cols());
            for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = result.mtr.scores(w, c);
            write_ranking_csv(result.data.tags, scores,
                              (fs::path(cfg.output_dir) /
                               ("ranking_window_" + std::to_string(w) + ".csv")).string());
        }
    }
}

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Consistency checks plus the standing advisories: keep runs under ~50 tags,
/// use at least ~2000 samples per estimate, make sure the delay grid spans
/// the plausible dead times, and watch for sampling too coarse for the
/// signal dynamics.
inline ValidationReport run_validate(const RunConfig& cfg) {
    ValidationReport report;
    TimeSeriesSet ts;
    try {
        if (cfg.data_path.empty()) throw ConfigError("config: 'data' is required");
        ts = load_csv(cfg.data_path);
    } catch (const Error& e) {
        report.errors.push_back(e.what());
        return report;
    }

    if (!cfg.tag_metadata_path.empty()) {
        try {
            const auto metas = load_tag_metadata(cfg.tag_metadata_path);
            ts = apply_tag_metadata(ts, metas);
        } catch (const Error& e) {
            report.errors.push_back(e.what());
        }
    } else if (cfg.scaling == ScalingChoice::limit_scale) {
        report.errors.push_back("limit scaling requires 'tag_metadata'");
    }

    if (ts.n_tags() > 50)
        report.warnings.push_back("analysis covers " + std::to_string(ts.n_tags()) +
                                  " tags; consider narrowing the scope to at most 50");
    std::size_t n = ts.n_samples() / std::max<std::size_t>(cfg.subsample_factor, 1);
    if (cfg.slice) n = std::min(n, cfg.slice->second);
    if (n < 2000)
        report.warnings.push_back("only " + std::to_string(n) +
                                  " samples per estimate; estimates stabilise above ~2000");

    const double period = ts.sample_period * static_cast<double>(cfg.subsample_factor);
    const double span = cfg.delays_samples.empty()
                            ? cfg.delay_span_seconds
                            : cfg.delays_samples.back() * period;
    if (span < 300.0)
        report.warnings.push_back("delay sweep spans " + std::to_string(span) +
                                  " s; a span of at least 300 s is advisable");

    for (std::size_t c = 0; c < ts.n_tags(); ++c) {
        const auto col = ts.values.column(c);
        if (sample_std(col) <= cfg.constant_filter_tolerance) continue;
        if (autocorrelation(col, 1) < 0.25)
            report.warnings.push_back("tag '" + ts.tags[c].name +
                                      "' decorrelates within one sample; the sampling period "
                                      "may violate the Nyquist rate for its dynamics");
    }
    return report;
}

}  // namespace faultrank
