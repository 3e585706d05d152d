#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "faultrank/centrality.hpp"
#include "faultrank/engine.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/signal_store.hpp"

namespace faultrank {

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline void write_edge_csv(const std::vector<EdgeResult>& edges, double sample_period,
                           const std::string& path) {
    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << "source,target,te_max,delay_samples,delay_seconds,weight,"
            "passed_magnitude,passed_direction,boundary_flag\n";
    for (const auto& e : edges) {
        file << e.source << ',' << e.target << ',' << detail::fmt(e.te_max) << ','
             << e.delay_opt << ','
             << detail::fmt(static_cast<double>(e.delay_opt) * sample_period) << ','
             << detail::fmt(e.weight) << ',' << to_string(e.passed_magnitude) << ','
             << to_string(e.passed_direction) << ','
             << (e.boundary_flag ? "true" : "false") << '\n';
    }
    if (!file) throw IOError("write failed for '" + path + "'");
}

inline std::vector<EdgeResult> read_edge_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IOError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(file, line)) throw IOError("'" + path + "': empty edge file");
    std::vector<EdgeResult> edges;
    std::size_t row = 1;
    const auto outcome = [](const std::string& s) {
        if (s == "true") return TestOutcome::passed;
        if (s == "false") return TestOutcome::failed;
        return TestOutcome::not_tested;
    };
    while (std::getline(file, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 9)
            throw IOError("'" + path + "': row " + std::to_string(row) + " has " +
                          std::to_string(fields.size()) + " fields, expected 9");
        EdgeResult e;
        e.source = detail::trim(fields[0]);
        e.target = detail::trim(fields[1]);
        e.te_max = detail::parse_cell(fields[2], row, 2);
        e.delay_opt = static_cast<int>(detail::parse_cell(fields[3], row, 3));
        e.weight = detail::parse_cell(fields[5], row, 5);
        e.passed_magnitude = outcome(detail::trim(fields[6]));
        e.passed_direction = outcome(detail::trim(fields[7]));
        e.boundary_flag = detail::trim(fields[8]) == "true";
        edges.push_back(std::move(e));
    }
    return edges;
}

/// Ranking table sorted by score, with bar-chart-friendly relative scores.
inline void write_ranking_csv(const std::vector<TagMeta>& tags,
                              const std::vector<double>& scores, const std::string& path) {
    if (tags.size() != scores.size())
        throw ParamError("write_ranking_csv: tag/score length mismatch");
    std::vector<std::size_t> order(tags.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    const double top = scores.empty() ? 0.0 : scores[order.front()];

    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << "rank,tag,description,kind,score,relative_score\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& tag = tags[order[r]];
        const double score = scores[order[r]];
        file << (r + 1) << ',' << tag.name << ',' << tag.description << ','
             << to_string(tag.kind) << ',' << detail::fmt(score) << ','
             << detail::fmt(top > 0.0 ? score / top : 0.0) << '\n';
    }
    if (!file) throw IOError("write failed for '" + path + "'");
}

/// Weight at the given percentile of the positive edge weights; edges below
/// it are dropped from the GML export to keep layouts readable.
inline double weight_percentile_threshold(const std::vector<EdgeResult>& edges,
                                          double percentile) {
    if (!(percentile >= 0.0 && percentile <= 100.0))
        throw ParamError("percentile must be in [0, 100]");
    std::vector<double> positive;
    for (const auto& e : edges)
        if (e.weight > 0.0) positive.push_back(e.weight);
    if (positive.empty() || percentile == 0.0) return 0.0;
    std::sort(positive.begin(), positive.end());
    const double pos = percentile / 100.0 * static_cast<double>(positive.size() - 1);
    const auto idx = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(idx);
    if (idx + 1 >= positive.size()) return positive.back();
    return positive[idx] * (1.0 - frac) + positive[idx + 1] * frac;
}

/// GML export of the ITN with node scores; edges with zero weight or below
/// the percentile threshold are omitted.
inline void write_gml(const std::vector<std::string>& tags, const std::vector<double>& scores,
                      const std::vector<EdgeResult>& edges, double sample_period,
                      const std::string& path, double weight_percentile = 0.0) {
    if (tags.size() != scores.size()) throw ParamError("write_gml: tag/score length mismatch");
    const double threshold = weight_percentile_threshold(edges, weight_percentile);

    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << "graph [\n  directed 1\n";
    for (std::size_t i = 0; i < tags.size(); ++i) {
        file << "  node [ id " << i << " label \"" << tags[i] << "\" score "
             << detail::fmt(scores[i]) << " ]\n";
    }
    const auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i] == name) return i;
        throw ParamError("write_gml: edge references unknown tag '" + name + "'");
    };
    for (const auto& e : edges) {
        if (e.weight <= 0.0 || e.weight < threshold) continue;
        file << "  edge [ source " << index_of(e.source) << " target " << index_of(e.target)
             << " weight " << detail::fmt(e.weight) << " delay "
             << detail::fmt(static_cast<double>(e.delay_opt) * sample_period) << " ]\n";
    }
    file << "]\n";
    if (!file) throw IOError("write failed for '" + path + "'");
}

}  // namespace faultrank
