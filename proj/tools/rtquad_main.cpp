// Copyright 2026 The rtquad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rtquad command-line front end.
//
// Exit codes: 0 success, 1 invalid invocation or configuration, 2 runtime or
// data error. RTQUAD_OUTPUT_DIR replaces the configured output directory.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtquad/config.hpp"
#include "rtquad/error.hpp"
#include "rtquad/io.hpp"
#include "rtquad/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using rtquad::RunConfig;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct ConfigSource {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> events;
    std::string filter;
    std::vector<double> filter_rates;
    std::optional<double> perturbation;

    void attach(CLI::App *cmd) {
        auto *file = cmd->add_option("--config", config_path, "JSON run configuration");
        auto *pre = cmd->add_option("--preset", preset, "built-in configuration (reference)");
        file->excludes(pre);
        cmd->add_option("--seed", seed, "override the simulation seed");
        cmd->add_option("--events", events, "override the number of heralded events");
        cmd->add_option("--filter", filter, "filter type")
            ->check(CLI::IsMember({"matched", "first-order", "custom"}));
        cmd->add_option("--filter-rates", filter_rates, "filter rates in 1/s (custom or first-order)")
            ->delimiter(',');
        cmd->add_option("--perturb", perturbation, "relative per-stage filter rate perturbation");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? rtquad::preset(preset.empty() ? "reference" : preset)
                                            : rtquad::load_config(config_path);
        if (seed) {
            cfg.simulation.seed = *seed;
        }
        if (events) {
            cfg.simulation.n_events = *events;
        }
        if (!filter.empty()) {
            cfg.simulation.filter.type = rtquad::filter_type_from_string(filter);
        }
        if (!filter_rates.empty()) {
            cfg.simulation.filter.rates = filter_rates;
        }
        if (perturbation) {
            cfg.simulation.filter.rate_perturbation = *perturbation;
        }
        if (const char *env = std::getenv("RTQUAD_OUTPUT_DIR"); env != nullptr && *env != '\0') {
            cfg.output_dir = env;
        }
        cfg.validate();
        return cfg;
    }
};

std::string in_output_dir(const RunConfig &cfg, const std::string &explicit_path, const std::string &fallback) {
    if (!explicit_path.empty()) {
        return explicit_path;
    }
    return (fs::path(cfg.output_dir) / fallback).string();
}

void print(const nlohmann::json &summary) {
    std::cout << summary.dump(2) << '\n';
}

int run(int argc, char **argv) {
    CLI::App app{"Heralded single-photon homodyne simulation, real-time filtering and tomography"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rtquad 0.1.0");

    ConfigSource sim_src;
    std::string sim_out;
    auto *simulate = app.add_subcommand("simulate", "simulate heralded traces into a QHT1 ensemble file");
    sim_src.attach(simulate);
    simulate->add_option("--out", sim_out, "ensemble file");

    ConfigSource an_src;
    std::string an_what;
    std::string an_in;
    std::string an_out;
    auto *analyze = app.add_subcommand("analyze", "analysis tables for a stored ensemble");
    an_src.attach(analyze);
    analyze->add_option("what", an_what, "pca | quads | profile | corr")
        ->required()
        ->check(CLI::IsMember({"pca", "quads", "profile", "corr"}));
    analyze->add_option("--in", an_in, "ensemble file")->required();
    analyze->add_option("--out", an_out, "output directory");

    ConfigSource tomo_src;
    std::string tomo_in;
    std::string tomo_out;
    std::string tomo_channel = "realtime";
    std::optional<std::size_t> cutoff;
    std::optional<std::size_t> replicas;
    auto *tomo = app.add_subcommand("tomo", "maximum-likelihood Fock-diagonal tomography of one quadrature channel");
    tomo_src.attach(tomo);
    tomo->add_option("--in", tomo_in, "quadrature CSV")->required();
    tomo->add_option("--out", tomo_out, "JSON report; tables are written next to it");
    tomo->add_option("--channel", tomo_channel, "column to read")
        ->check(CLI::IsMember({"realtime", "postprocessed"}));
    tomo->add_option("--cutoff", cutoff, "Fock cutoff");
    tomo->add_option("--bootstrap", replicas, "bootstrap replicas (0 disables)");

    ConfigSource rep_src;
    std::string rep_out;
    auto *reproduce = app.add_subcommand("reproduce", "full pipeline with every report table");
    rep_src.attach(reproduce);
    reproduce->add_option("--out", rep_out, "output directory");

    ConfigSource stream_src;
    std::string stream_out;
    std::optional<double> duration;
    auto *stream = app.add_subcommand("stream", "continuous stream with Poisson heralds through the causal filter");
    stream_src.attach(stream);
    stream->add_option("--out", stream_out, "output directory");
    stream->add_option("--duration", duration, "stream length in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }

    if (simulate->parsed()) {
        RunConfig cfg = sim_src.resolve();
        print(rtquad::cmd_simulate(cfg, in_output_dir(cfg, sim_out, "ensemble.qht")));
    } else if (analyze->parsed()) {
        RunConfig cfg = an_src.resolve();
        std::string dir = an_out.empty() ? cfg.output_dir : an_out;
        print(rtquad::cmd_analyze(rtquad::analyze_what_from_string(an_what), an_in, cfg, dir));
    } else if (tomo->parsed()) {
        RunConfig cfg = tomo_src.resolve();
        if (cutoff) {
            cfg.tomography.cutoff = *cutoff;
        }
        if (replicas) {
            cfg.tomography.bootstrap = *replicas;
        }
        cfg.validate();
        print(rtquad::cmd_tomo(tomo_in, rtquad::channel_from_string(tomo_channel), cfg,
                               in_output_dir(cfg, tomo_out, "tomo.json")));
    } else if (reproduce->parsed()) {
        RunConfig cfg = rep_src.resolve();
        print(rtquad::cmd_reproduce(cfg, rep_out.empty() ? cfg.output_dir : rep_out));
    } else if (stream->parsed()) {
        RunConfig cfg = stream_src.resolve();
        if (duration) {
            cfg.stream_duration = *duration;
        }
        print(rtquad::cmd_stream(cfg, stream_out.empty() ? cfg.output_dir : stream_out));
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const rtquad::ConfigError &e) {
        std::cerr << "rtquad: " << e.what() << '\n';
        return kExitValidation;
    } catch (const rtquad::InvalidParameter &e) {
        std::cerr << "rtquad: invalid parameter: " << e.what() << '\n';
        return kExitValidation;
    } catch (const rtquad::DegeneratePoles &e) {
        std::cerr << "rtquad: invalid parameter: " << e.what() << '\n';
        return kExitValidation;
    } catch (const rtquad::UnsupportedMode &e) {
        std::cerr << "rtquad: invalid parameter: " << e.what() << '\n';
        return kExitValidation;
    } catch (const rtquad::UndersampledFilter &e) {
        std::cerr << "rtquad: invalid parameter: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "rtquad: error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
