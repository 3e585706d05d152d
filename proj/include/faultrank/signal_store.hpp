#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "faultrank/errors.hpp"
#include "faultrank/math_util.hpp"
#include "faultrank/matrix.hpp"

namespace faultrank {

enum class TagKind { PV, CV, MV, SP, DV };

inline std::string to_string(TagKind kind) {
    switch (kind) {
        case TagKind::PV: return "PV";
        case TagKind::CV: return "CV";
        case TagKind::MV: return "MV";
        case TagKind::SP: return "SP";
        case TagKind::DV: return "DV";
    }
    return "PV";
}

inline TagKind tag_kind_from_string(const std::string& s) {
    if (s == "PV") return TagKind::PV;
    if (s == "CV") return TagKind::CV;
    if (s == "MV") return TagKind::MV;
    if (s == "SP") return TagKind::SP;
    if (s == "DV") return TagKind::DV;
    throw IngestError("unknown tag kind '" + s + "'");
}

struct TagMeta {
    std::string name;
    std::string description;
    TagKind kind = TagKind::PV;
    double nominal = 0.0;
    double low_limit = 0.0;
    double high_limit = 0.0;
    bool has_limits = false;  // set when loaded from a metadata file

    void validate() const {
        if (!(low_limit < high_limit))
            throw IngestError("tag '" + name + "': low limit must be below high limit");
        if (!(low_limit <= nominal && nominal <= high_limit))
            throw IngestError("tag '" + name + "': nominal outside [low, high]");
    }
};

enum class ScalingState { raw, standardised, limit_scaled };

/// Uniformly sampled multivariate signal matrix with per-tag metadata.
/// Read-only after construction; the analysis operations below return
/// modified copies.
struct TimeSeriesSet {
    std::vector<TagMeta> tags;
    double sample_period = 1.0;  // seconds
    double start_time = 0.0;     // seconds
    Matrix values;               // n_samples x n_tags
    ScalingState scaling_state = ScalingState::raw;
    std::vector<std::string> flagged_constant;  // columns mean-centred only by standardise

    std::size_t n_samples() const { return values.rows(); }
    std::size_t n_tags() const { return values.cols(); }

    std::size_t tag_index(const std::string& name) const {
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i].name == name) return i;
        throw ParamError("unknown tag '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        return values.column(tag_index(name));
    }
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end)
        throw IngestError("non-numeric cell at row " + std::to_string(row) + ", column " +
                          std::to_string(col));
    if (!std::isfinite(value))
        throw IngestError("non-finite value at row " + std::to_string(row) + ", column " +
                          std::to_string(col));
    return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    std::size_t e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Loads a `time,<tag1>,<tag2>,...` CSV. Timestamps must be uniformly spaced
/// within 0.1% relative tolerance; the sample period is the median delta.
inline TimeSeriesSet load_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IngestError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) throw IngestError("'" + path + "': empty file");
    auto header = detail::split_csv_line(line);
    if (header.size() < 2) throw IngestError("'" + path + "': header needs time plus one tag");
    if (detail::trim(header[0]) != "time")
        throw IngestError("'" + path + "': first header column must be 'time'");

    TimeSeriesSet ts;
    for (std::size_t c = 1; c < header.size(); ++c) {
        TagMeta meta;
        meta.name = detail::trim(header[c]);
        if (meta.name.empty()) throw IngestError("'" + path + "': empty tag name in header");
        for (const auto& existing : ts.tags)
            if (existing.name == meta.name)
                throw IngestError("duplicate tag name '" + meta.name + "'");
        ts.tags.push_back(std::move(meta));
    }

    const std::size_t n_tags = ts.tags.size();
    std::vector<double> times;
    std::vector<double> flat;
    std::size_t row = 1;
    while (std::getline(file, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != n_tags + 1)
            throw IngestError("row " + std::to_string(row) + ": expected " +
                              std::to_string(n_tags + 1) + " fields, got " +
                              std::to_string(fields.size()));
        times.push_back(detail::parse_cell(fields[0], row, 0));
        for (std::size_t c = 1; c < fields.size(); ++c)
            flat.push_back(detail::parse_cell(fields[c], row, c));
    }

    const std::size_t n = times.size();
    if (n < 2) throw IngestError("'" + path + "': need at least 2 samples");

    std::vector<double> deltas(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        deltas[i] = times[i + 1] - times[i];
        if (!(deltas[i] > 0.0))
            throw IngestError("non-uniform timestamps: not strictly increasing at row " +
                              std::to_string(i + 2));
    }
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const double period = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (std::abs(deltas[i] - period) > 1e-3 * period)
            throw IngestError("non-uniform timestamps: delta at row " + std::to_string(i + 2) +
                              " deviates more than 0.1% from the median period");
    }

    ts.sample_period = period;
    ts.start_time = times.front();
    ts.values = Matrix(n, n_tags);
    std::copy(flat.begin(), flat.end(), ts.values.data().begin());
    ts.scaling_state = ScalingState::raw;
    return ts;
}

/// Writes the inverse of load_csv: 12 significant digits, bit-stable for
/// fixed inputs.
inline void write_csv(const TimeSeriesSet& ts, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << "time";
    for (const auto& tag : ts.tags) file << ',' << tag.name;
    file << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ts.n_samples(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.12g",
                      ts.start_time + static_cast<double>(r) * ts.sample_period);
        file << buf;
        for (std::size_t c = 0; c < ts.n_tags(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", ts.values(r, c));
            file << ',' << buf;
        }
        file << '\n';
    }
    if (!file) throw IOError("write failed for '" + path + "'");
}

/// Tag metadata file: JSON array of
/// {name, description, kind, nominal, low, high}.
inline std::vector<TagMeta> load_tag_metadata(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IngestError("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        file >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("'" + path + "': " + e.what());
    }
    if (!doc.is_array()) throw IngestError("'" + path + "': expected a JSON array");
    std::vector<TagMeta> metas;
    for (const auto& item : doc) {
        TagMeta meta;
        try {
            meta.name = item.at("name").get<std::string>();
            meta.description = item.value("description", "");
            meta.kind = tag_kind_from_string(item.at("kind").get<std::string>());
            meta.nominal = item.at("nominal").get<double>();
            meta.low_limit = item.at("low").get<double>();
            meta.high_limit = item.at("high").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw IngestError("'" + path + "': " + e.what());
        }
        meta.has_limits = true;
        meta.validate();
        for (const auto& existing : metas)
            if (existing.name == meta.name)
                throw IngestError("duplicate tag metadata for '" + meta.name + "'");
        metas.push_back(std::move(meta));
    }
    return metas;
}

inline void save_tag_metadata(const std::vector<TagMeta>& metas, const std::string& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& meta : metas) {
        doc.push_back({{"name", meta.name},
                       {"description", meta.description},
                       {"kind", to_string(meta.kind)},
                       {"nominal", meta.nominal},
                       {"low", meta.low_limit},
                       {"high", meta.high_limit}});
    }
    std::ofstream file(path);
    if (!file) throw IOError("cannot write '" + path + "'");
    file << doc.dump(2) << '\n';
    if (!file) throw IOError("write failed for '" + path + "'");
}

/// Attaches metadata to matching columns. Every column must be covered.
inline TimeSeriesSet apply_tag_metadata(TimeSeriesSet ts, const std::vector<TagMeta>& metas) {
    for (auto& tag : ts.tags) {
        const auto it = std::find_if(metas.begin(), metas.end(),
                                     [&](const TagMeta& m) { return m.name == tag.name; });
        if (it == metas.end())
            throw IngestError("no metadata for tag '" + tag.name + "'");
        tag = *it;
    }
    return ts;
}

/// Keeps every factor-th row starting at index 0.
inline TimeSeriesSet subsample(const TimeSeriesSet& ts, std::size_t factor) {
    if (factor < 1) throw ParamError("subsample: factor must be >= 1");
    if (factor > ts.n_samples()) throw ParamError("subsample: factor exceeds sample count");
    const std::size_t n = (ts.n_samples() + factor - 1) / factor;
    if (n < 2) throw ParamError("subsample: fewer than 2 samples would remain");
    TimeSeriesSet out = ts;
    out.sample_period = ts.sample_period * static_cast<double>(factor);
    out.values = Matrix(n, ts.n_tags());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < ts.n_tags(); ++c)
            out.values(r, c) = ts.values(r * factor, c);
    return out;
}

constexpr double kConstantTolerance = 1e-12;

/// Zero-mean unit-std columns. Columns with std below `constant_tolerance`
/// are mean-centred only and reported in `flagged_constant`.
inline TimeSeriesSet standardise(const TimeSeriesSet& ts,
                                 double constant_tolerance = kConstantTolerance) {
    if (ts.scaling_state != ScalingState::raw)
        throw ParamError("standardise: input already scaled");
    TimeSeriesSet out = ts;
    out.flagged_constant.clear();
    for (std::size_t c = 0; c < ts.n_tags(); ++c) {
        auto col = ts.values.column(c);
        const double m = mean(col);
        const double s = sample_std(col);
        if (s <= constant_tolerance) {
            for (auto& x : col) x -= m;
            out.flagged_constant.push_back(ts.tags[c].name);
        } else {
            for (auto& x : col) x = (x - m) / s;
        }
        out.values.set_column(c, col);
    }
    out.scaling_state = ScalingState::standardised;
    return out;
}

/// Span used by process-limit scaling: the conservative rule takes the larger
/// nominal-to-limit distance for measurements, disturbances and set-points,
/// and the smaller one for manipulated inputs.
inline double limit_span(const TagMeta& tag) {
    const double up = tag.high_limit - tag.nominal;
    const double down = tag.nominal - tag.low_limit;
    return tag.kind == TagKind::MV ? std::min(up, down) : std::max(up, down);
}

inline TimeSeriesSet limit_scale(const TimeSeriesSet& ts) {
    if (ts.scaling_state != ScalingState::raw)
        throw ParamError("limit_scale: input already scaled");
    TimeSeriesSet out = ts;
    for (std::size_t c = 0; c < ts.n_tags(); ++c) {
        const TagMeta& tag = ts.tags[c];
        if (!tag.has_limits)
            throw ScalingError("tag '" + tag.name + "' has no limit metadata");
        const double span = limit_span(tag);
        if (span <= 0.0) throw ScalingError("tag '" + tag.name + "' has zero scaling span");
        auto col = ts.values.column(c);
        for (auto& x : col) x = (x - tag.nominal) / span;
        out.values.set_column(c, col);
    }
    out.scaling_state = ScalingState::limit_scaled;
    return out;
}

struct FilterResult {
    TimeSeriesSet set;
    std::vector<std::string> removed;
};

/// Removes columns whose sample std is <= tolerance. Constant signals carry
/// no information flow and upset the k-NN estimator's tie-breaking noise.
inline FilterResult filter_constant(const TimeSeriesSet& ts, double tolerance) {
    if (tolerance < 0.0) throw ParamError("filter_constant: tolerance must be >= 0");
    FilterResult result;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < ts.n_tags(); ++c) {
        if (sample_std(ts.values.column(c)) <= tolerance)
            result.removed.push_back(ts.tags[c].name);
        else
            keep.push_back(c);
    }
    if (keep.empty()) throw EmptySetError("filter_constant: all columns are constant");
    result.set = ts;
    result.set.tags.clear();
    result.set.values = Matrix(ts.n_samples(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        result.set.tags.push_back(ts.tags[keep[j]]);
        result.set.values.set_column(j, ts.values.column(keep[j]));
    }
    return result;
}

/// Contiguous slice with adjusted start time.
inline TimeSeriesSet window(const TimeSeriesSet& ts, std::size_t start_index,
                            std::size_t length) {
    if (length < 1) throw ParamError("window: length must be positive");
    if (start_index + length > ts.n_samples())
        throw ParamError("window: slice [" + std::to_string(start_index) + ", " +
                         std::to_string(start_index + length) + ") out of range");
    TimeSeriesSet out = ts;
    out.start_time = ts.start_time + static_cast<double>(start_index) * ts.sample_period;
    out.values = Matrix(length, ts.n_tags());
    for (std::size_t r = 0; r < length; ++r)
        for (std::size_t c = 0; c < ts.n_tags(); ++c)
            out.values(r, c) = ts.values(start_index + r, c);
    return out;
}

}  // namespace faultrank
