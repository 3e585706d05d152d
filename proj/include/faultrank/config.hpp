#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "faultrank/centrality.hpp"
#include "faultrank/engine.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/simulate.hpp"
#include "faultrank/surrogates.hpp"

namespace faultrank {

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const std::string& context,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open '" + path + "'");
    json doc;
    try {
        file >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    return doc;
}

}  // namespace detail

enum class ScalingChoice { standardise, limit_scale };

/// Full description of one analysis run; serialised as the JSON config the
/// CLI consumes. Unknown keys are rejected.
struct RunConfig {
    std::string data_path;
    std::string tag_metadata_path;  // required for limit scaling
    std::size_t subsample_factor = 1;
    ScalingChoice scaling = ScalingChoice::standardise;
    double constant_filter_tolerance = kConstantTolerance;
    std::optional<std::pair<std::size_t, std::size_t>> slice;  // start, length

    EstimatorConfig estimator;
    EmbeddingSpec embedding;
    bool auto_embedding = false;
    int auto_max_k = 4;
    int auto_max_tau = 4;

    std::vector<int> delays_samples;      // explicit grid; empty = derive from span
    double delay_span_seconds = 300.0;

    std::optional<SurrogatePolicy> surrogates;
    std::optional<DirectionalityMode> directionality;
    WeightKind weight_kind = WeightKind::simple;

    RankSpec rank;
    RankMethod rank_method = RankMethod::eigenvector;

    std::size_t window_samples = 0;       // mtr only
    double window_overlap = 0.75;
    bool window_rankings = false;

    std::string output_dir = ".";
    std::uint64_t rng_seed = 1;
    unsigned workers = 0;
};

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    using detail::get_or;
    using detail::require_keys;
    require_keys(doc, "config",
                 {"data", "tag_metadata", "subsample", "scaling", "constant_filter_tolerance",
                  "slice", "estimator", "embedding", "delays", "surrogates", "directionality",
                  "weight_kind", "rank", "window", "output_dir", "rng_seed", "workers"});

    RunConfig cfg;
    cfg.data_path = get_or<std::string>(doc, "data", "");
    cfg.tag_metadata_path = get_or<std::string>(doc, "tag_metadata", "");
    cfg.subsample_factor = get_or<std::size_t>(doc, "subsample", 1);
    const std::string scaling = get_or<std::string>(doc, "scaling", "standardise");
    if (scaling == "standardise") cfg.scaling = ScalingChoice::standardise;
    else if (scaling == "limit_scale") cfg.scaling = ScalingChoice::limit_scale;
    else throw ConfigError("scaling: expected 'standardise' or 'limit_scale'");
    cfg.constant_filter_tolerance =
        get_or<double>(doc, "constant_filter_tolerance", kConstantTolerance);

    if (doc.contains("slice")) {
        const auto& slice = doc.at("slice");
        require_keys(slice, "slice", {"start", "length"});
        cfg.slice = {get_or<std::size_t>(slice, "start", 0),
                     get_or<std::size_t>(slice, "length", 0)};
    }

    if (doc.contains("estimator")) {
        const auto& est = doc.at("estimator");
        require_keys(est, "estimator",
                     {"method", "k_neighbours", "bandwidth", "theiler_window",
                      "noise_amplitude"});
        const std::string method = get_or<std::string>(est, "method", "ksg");
        if (method == "ksg") cfg.estimator.kind = EstimatorKind::ksg;
        else if (method == "kernel") cfg.estimator.kind = EstimatorKind::kernel;
        else throw ConfigError("estimator.method: expected 'ksg' or 'kernel'");
        cfg.estimator.ksg.k_neighbours = get_or<int>(est, "k_neighbours", 4);
        cfg.estimator.kernel.bandwidth = get_or<double>(est, "bandwidth", 0.3);
        const int theiler = get_or<int>(est, "theiler_window", 10);
        cfg.estimator.ksg.theiler_window = theiler;
        cfg.estimator.kernel.theiler_window = theiler;
        cfg.estimator.ksg.noise_amplitude = get_or<double>(est, "noise_amplitude", 1e-8);
    }

    if (doc.contains("embedding")) {
        const auto& emb = doc.at("embedding");
        require_keys(emb, "embedding",
                     {"k_target", "l_source", "tau", "auto", "auto_max_k", "auto_max_tau"});
        cfg.embedding.k_target = get_or<int>(emb, "k_target", 1);
        cfg.embedding.l_source = get_or<int>(emb, "l_source", 1);
        cfg.embedding.tau = get_or<int>(emb, "tau", 1);
        cfg.auto_embedding = get_or<bool>(emb, "auto", false);
        cfg.auto_max_k = get_or<int>(emb, "auto_max_k", 4);
        cfg.auto_max_tau = get_or<int>(emb, "auto_max_tau", 4);
    }

    if (doc.contains("delays")) {
        const auto& delays = doc.at("delays");
        require_keys(delays, "delays", {"samples", "max_seconds"});
        if (delays.contains("samples")) {
            cfg.delays_samples = delays.at("samples").get<std::vector<int>>();
            if (delays.contains("max_seconds"))
                throw ConfigError("delays: give either 'samples' or 'max_seconds'");
        } else {
            cfg.delay_span_seconds = get_or<double>(delays, "max_seconds", 300.0);
        }
    }

    if (doc.contains("surrogates") && !doc.at("surrogates").is_null()) {
        const auto& surr = doc.at("surrogates");
        require_keys(surr, "surrogates", {"method", "alpha", "count", "iterations", "seed"});
        const std::string method = get_or<std::string>(surr, "method", "iaaft");
        SurrogateMethod m;
        if (method == "iaaft") m = SurrogateMethod::iaaft;
        else if (method == "shuffle") m = SurrogateMethod::shuffle;
        else throw ConfigError("surrogates.method: expected 'iaaft' or 'shuffle'");
        auto policy = SurrogatePolicy::from_alpha(get_or<double>(surr, "alpha", 0.05), m);
        if (surr.contains("count")) policy.count = get_or<int>(surr, "count", policy.count);
        if (policy.count < 1) throw ConfigError("surrogates.count: must be >= 1");
        policy.iaaft_iterations = get_or<int>(surr, "iterations", 100);
        policy.rng_seed = get_or<std::uint64_t>(surr, "seed", 1);
        cfg.surrogates = policy;
    }

    const std::string direction = get_or<std::string>(doc, "directionality", "off");
    if (direction == "corrected") cfg.directionality = DirectionalityMode::corrected;
    else if (direction == "paper_literal") cfg.directionality = DirectionalityMode::paper_literal;
    else if (direction != "off")
        throw ConfigError("directionality: expected 'off', 'corrected' or 'paper_literal'");

    const std::string weights = get_or<std::string>(doc, "weight_kind", "simple");
    if (weights == "simple") cfg.weight_kind = WeightKind::simple;
    else if (weights == "directional") cfg.weight_kind = WeightKind::directional;
    else throw ConfigError("weight_kind: expected 'simple' or 'directional'");

    if (doc.contains("rank")) {
        const auto& rank = doc.at("rank");
        require_keys(rank, "rank", {"m", "reset_bias", "method", "katz_alpha_fraction"});
        cfg.rank.m = get_or<double>(rank, "m", 0.999);
        if (rank.contains("reset_bias"))
            cfg.rank.reset_bias = rank.at("reset_bias").get<std::vector<double>>();
        cfg.rank.katz_alpha_fraction = get_or<double>(rank, "katz_alpha_fraction", 0.999);
        const std::string method = get_or<std::string>(rank, "method", "eigenvector");
        if (method == "eigenvector") cfg.rank_method = RankMethod::eigenvector;
        else if (method == "katz") cfg.rank_method = RankMethod::katz;
        else throw ConfigError("rank.method: expected 'eigenvector' or 'katz'");
    }

    if (doc.contains("window")) {
        const auto& win = doc.at("window");
        require_keys(win, "window", {"samples", "overlap", "rankings"});
        cfg.window_samples = get_or<std::size_t>(win, "samples", 0);
        cfg.window_overlap = get_or<double>(win, "overlap", 0.75);
        cfg.window_rankings = get_or<bool>(win, "rankings", false);
    }

    cfg.output_dir = get_or<std::string>(doc, "output_dir", ".");
    cfg.rng_seed = get_or<std::uint64_t>(doc, "rng_seed", 1);
    cfg.workers = get_or<unsigned>(doc, "workers", 0);
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(detail::load_json_file(path));
}

/// Scenario file for the `simulate` subcommand: either the mixing-tank
/// process or a coupled autoregressive system.
struct Scenario {
    enum class Type { mixing, var } type = Type::mixing;
    MixingConfig mixing;
    ARConfig var;
    std::vector<Coupling> couplings;
};

inline Scenario parse_scenario(const nlohmann::json& doc) {
    using detail::get_or;
    using detail::require_keys;
    Scenario scenario;
    const std::string type = get_or<std::string>(doc, "type", "");
    if (type == "mixing") {
        scenario.type = Scenario::Type::mixing;
        require_keys(doc, "scenario",
                     {"type", "seed", "duration_h", "sample_period_s", "integrator_step_s",
                      "tank_area_m2", "feed_fraction_a", "feed_fraction_b", "valve_coefficient",
                      "flow_a_nominal", "flow_b_nominal", "level_setpoint_m",
                      "composition_setpoint", "level_controller", "composition_controller",
                      "fb_noise_std", "fb_noise_tau_h", "fb_noise_from_h", "fb_noise_to_h",
                      "xsp_step_fraction", "xsp_step_period_h", "xsp_steps_from_h",
                      "xsp_steps_to_h"});
        MixingConfig& m = scenario.mixing;
        m.rng_seed = get_or<std::uint64_t>(doc, "seed", 1);
        m.duration_h = get_or<double>(doc, "duration_h", m.duration_h);
        m.sample_period_s = get_or<double>(doc, "sample_period_s", m.sample_period_s);
        m.integrator_step_s = get_or<double>(doc, "integrator_step_s", m.integrator_step_s);
        m.tank_area_m2 = get_or<double>(doc, "tank_area_m2", m.tank_area_m2);
        m.feed_fraction_a = get_or<double>(doc, "feed_fraction_a", m.feed_fraction_a);
        m.feed_fraction_b = get_or<double>(doc, "feed_fraction_b", m.feed_fraction_b);
        m.valve_coefficient = get_or<double>(doc, "valve_coefficient", m.valve_coefficient);
        m.flow_a_nominal = get_or<double>(doc, "flow_a_nominal", m.flow_a_nominal);
        m.flow_b_nominal = get_or<double>(doc, "flow_b_nominal", m.flow_b_nominal);
        m.level_setpoint_m = get_or<double>(doc, "level_setpoint_m", m.level_setpoint_m);
        m.composition_setpoint =
            get_or<double>(doc, "composition_setpoint", m.composition_setpoint);
        const auto parse_pi = [&](const std::string& key, PiSettings& pi) {
            if (!doc.contains(key)) return;
            const auto& obj = doc.at(key);
            require_keys(obj, key, {"gain", "integral_time_h", "nominal", "low", "high"});
            pi.gain = get_or<double>(obj, "gain", pi.gain);
            pi.integral_time_h = get_or<double>(obj, "integral_time_h", pi.integral_time_h);
            pi.output_nominal = get_or<double>(obj, "nominal", pi.output_nominal);
            pi.output_low = get_or<double>(obj, "low", pi.output_low);
            pi.output_high = get_or<double>(obj, "high", pi.output_high);
        };
        parse_pi("level_controller", m.level_controller);
        parse_pi("composition_controller", m.composition_controller);
        m.fb_noise_std = get_or<double>(doc, "fb_noise_std", m.fb_noise_std);
        m.fb_noise_tau_h = get_or<double>(doc, "fb_noise_tau_h", m.fb_noise_tau_h);
        m.fb_noise_from_h = get_or<double>(doc, "fb_noise_from_h", m.fb_noise_from_h);
        m.fb_noise_to_h = get_or<double>(doc, "fb_noise_to_h", m.fb_noise_to_h);
        m.xsp_step_fraction = get_or<double>(doc, "xsp_step_fraction", m.xsp_step_fraction);
        m.xsp_step_period_h = get_or<double>(doc, "xsp_step_period_h", m.xsp_step_period_h);
        m.xsp_steps_from_h = get_or<double>(doc, "xsp_steps_from_h", m.xsp_steps_from_h);
        m.xsp_steps_to_h = get_or<double>(doc, "xsp_steps_to_h", m.xsp_steps_to_h);
    } else if (type == "var") {
        scenario.type = Scenario::Type::var;
        require_keys(doc, "scenario",
                     {"type", "seed", "self_coefficients", "couplings", "noise_std", "length",
                      "burn_in", "names"});
        ARConfig& v = scenario.var;
        v.rng_seed = get_or<std::uint64_t>(doc, "seed", 1);
        if (!doc.contains("self_coefficients"))
            throw ConfigError("scenario: 'self_coefficients' is required for type 'var'");
        v.self_coefficients =
            doc.at("self_coefficients").get<std::vector<std::vector<double>>>();
        v.noise_std = get_or<double>(doc, "noise_std", 1.0);
        v.length = get_or<std::size_t>(doc, "length", 2000);
        v.burn_in = get_or<std::size_t>(doc, "burn_in", 1000);
        if (doc.contains("names"))
            v.names = doc.at("names").get<std::vector<std::string>>();
        if (doc.contains("couplings")) {
            for (const auto& item : doc.at("couplings")) {
                require_keys(item, "coupling", {"from", "to", "coeff", "delay"});
                Coupling c;
                c.from = get_or<std::size_t>(item, "from", 0);
                c.to = get_or<std::size_t>(item, "to", 0);
                c.coeff = get_or<double>(item, "coeff", 0.0);
                c.delay = get_or<int>(item, "delay", 1);
                scenario.couplings.push_back(c);
            }
        }
    } else {
        throw ConfigError("scenario: 'type' must be 'mixing' or 'var'");
    }
    return scenario;
}

inline Scenario load_scenario(const std::string& path) {
    return parse_scenario(detail::load_json_file(path));
}

}  // namespace faultrank
