// Command-line front end: validate | analyse | mtr | simulate | export-gml.
// Errors are reported as one JSON object on stderr and a nonzero exit code.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "faultrank/faultrank.hpp"

namespace {

namespace fs = std::filesystem;
using faultrank::RunConfig;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> output_dir;
};

RunConfig load_config(const std::string& path, const Overrides& overrides) {
    RunConfig cfg = faultrank::load_run_config(path);
    if (overrides.seed) cfg.rng_seed = *overrides.seed;
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    return cfg;
}

int cmd_validate(const std::string& config_path, const Overrides& overrides) {
    const RunConfig cfg = load_config(config_path, overrides);
    const auto report = faultrank::run_validate(cfg);
    for (const auto& warning : report.warnings) std::cout << "warning: " << warning << "\n";
    for (const auto& error : report.errors) std::cout << "error: " << error << "\n";
    std::cout << (report.ok() ? "OK" : "INVALID") << "\n";
    return report.ok() ? 0 : 1;
}

int cmd_analyse(const std::string& config_path, const Overrides& overrides,
                double gml_percentile) {
    const RunConfig cfg = load_config(config_path, overrides);
    const auto result = faultrank::run_analyse(cfg);
    faultrank::write_analyse_outputs(cfg, result, gml_percentile);
    for (const auto& tag : result.removed_tags)
        std::cout << "filtered constant tag: " << tag << "\n";
    std::cout << "wrote edges.csv, ranking.csv, itn.gml to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_mtr(const std::string& config_path, const Overrides& overrides) {
    const RunConfig cfg = load_config(config_path, overrides);
    const auto result = faultrank::run_mtr(cfg);
    faultrank::write_mtr_outputs(cfg, result);
    std::cout << "wrote mtr.csv (" << result.mtr.scores.rows() << " windows x "
              << result.mtr.scores.cols() << " tags) to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& output_dir,
                 const Overrides& overrides) {
    faultrank::Scenario scenario = faultrank::load_scenario(scenario_path);
    fs::create_directories(output_dir);
    faultrank::TimeSeriesSet ts;
    if (scenario.type == faultrank::Scenario::Type::mixing) {
        if (overrides.seed) scenario.mixing.rng_seed = *overrides.seed;
        ts = faultrank::simulate_mixing(scenario.mixing);
    } else {
        if (overrides.seed) scenario.var.rng_seed = *overrides.seed;
        ts = faultrank::simulate_var(scenario.var, scenario.couplings);
        // Generated benchmark tags carry data-derived limits so the output
        // is usable with either scaling mode.
        for (std::size_t c = 0; c < ts.n_tags(); ++c) {
            const auto col = ts.values.column(c);
            const double m = faultrank::mean(col);
            const double s = faultrank::sample_std(col);
            ts.tags[c].nominal = m;
            ts.tags[c].low_limit = m - 4.0 * std::max(s, 1e-9);
            ts.tags[c].high_limit = m + 4.0 * std::max(s, 1e-9);
            ts.tags[c].has_limits = true;
        }
    }
    const std::string data_path = (fs::path(output_dir) / "data.csv").string();
    const std::string meta_path = (fs::path(output_dir) / "tags.json").string();
    faultrank::write_csv(ts, data_path);
    faultrank::save_tag_metadata(ts.tags, meta_path);
    std::cout << "wrote " << data_path << " (" << ts.n_samples() << " samples x "
              << ts.n_tags() << " tags) and " << meta_path << "\n";
    return 0;
}

int cmd_export_gml(const std::string& edges_path, const std::string& ranking_path,
                   const std::string& output_path, double percentile) {
    const auto edges = faultrank::read_edge_csv(edges_path);

    std::vector<std::string> tags;
    std::vector<double> scores;
    const auto add_tag = [&](const std::string& name) {
        for (const auto& t : tags)
            if (t == name) return;
        tags.push_back(name);
        scores.push_back(0.0);
    };
    for (const auto& e : edges) {
        add_tag(e.source);
        add_tag(e.target);
    }
    if (!ranking_path.empty()) {
        std::ifstream file(ranking_path);
        if (!file) throw faultrank::IOError("cannot open '" + ranking_path + "'");
        std::string line;
        std::getline(file, line);  // header
        while (std::getline(file, line)) {
            if (line.empty()) continue;
            const auto fields = faultrank::detail::split_csv_line(line);
            if (fields.size() < 5) continue;
            const std::string name = faultrank::detail::trim(fields[1]);
            for (std::size_t i = 0; i < tags.size(); ++i)
                if (tags[i] == name) scores[i] = std::stod(fields[4]);
        }
    }
    // Delay seconds were already resolved when the edge file was written.
    faultrank::write_gml(tags, scores, edges, 1.0, output_path, percentile);
    std::cout << "wrote " << output_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer-entropy network inference and fault-source ranking"};
    app.require_subcommand(1);

    Overrides overrides;
    std::string config_path, scenario_path, output_dir = ".";
    std::string edges_path, ranking_path, gml_path = "itn.gml";
    double percentile = 0.0;

    const auto add_common = [&](CLI::App* cmd, bool with_config) {
        if (with_config)
            cmd->add_option("-c,--config", config_path, "run configuration JSON")->required();
        cmd->add_option("--seed", [&](const CLI::results_t& v) {
            overrides.seed = std::stoull(v.front());
            return true;
        }, "override the configured RNG seed");
        cmd->add_option("--workers", [&](const CLI::results_t& v) {
            overrides.workers = static_cast<unsigned>(std::stoul(v.front()));
            return true;
        }, "override the worker count (0 = hardware)");
        cmd->add_option("--output-dir", [&](const CLI::results_t& v) {
            overrides.output_dir = v.front();
            return true;
        }, "override the output directory");
    };

    auto* validate = app.add_subcommand("validate", "check data/metadata consistency");
    add_common(validate, true);

    auto* analyse = app.add_subcommand("analyse", "single-window network build and ranking");
    add_common(analyse, true);
    analyse->add_option("--gml-percentile", percentile,
                        "drop edges below this weight percentile in the GML export");

    auto* mtr = app.add_subcommand("mtr", "rolling-window monitoring matrix");
    add_common(mtr, true);

    auto* simulate = app.add_subcommand("simulate", "generate a benchmark dataset");
    simulate->add_option("-s,--scenario", scenario_path, "scenario JSON")->required();
    simulate->add_option("-o,--output-dir", output_dir, "output directory");
    add_common(simulate, false);

    auto* export_gml = app.add_subcommand("export-gml", "re-filter an edge CSV into GML");
    export_gml->add_option("--edges", edges_path, "edge CSV produced by analyse")->required();
    export_gml->add_option("--ranking", ranking_path, "ranking CSV for node scores");
    export_gml->add_option("--output", gml_path, "output GML path");
    export_gml->add_option("--percentile", percentile, "weight percentile cut");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path, overrides);
        if (analyse->parsed()) return cmd_analyse(config_path, overrides, percentile);
        if (mtr->parsed()) return cmd_mtr(config_path, overrides);
        if (simulate->parsed())
            return cmd_simulate(scenario_path,
                                overrides.output_dir.value_or(output_dir), overrides);
        if (export_gml->parsed())
            return cmd_export_gml(edges_path, ranking_path, gml_path, percentile);
    } catch (const faultrank::Error& e) {
        nlohmann::json err{{"error", e.kind()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "InternalError"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
