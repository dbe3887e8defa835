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

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "rtquad/analysis.hpp"
#include "rtquad/config.hpp"
#include "rtquad/tomography.hpp"

namespace rtquad {

/// Maximum-likelihood state of one quadrature channel with bootstrap errors
/// and its Wigner section.
struct TomographyOutcome {
    Channel channel = Channel::postprocessed;
    std::size_t n_samples = 0;
    MleResult mle;
    std::vector<double> rho_err;  ///< empty without bootstrap
    double wigner_origin = 0.0;
    double wigner_origin_err = 0.0;
    std::vector<double> radii;
    std::vector<double> section;
    std::size_t bootstrap_replicas = 0;
};

TomographyOutcome run_tomography(std::span<const double> values, Channel channel,
                                 const TomographySettings &settings, std::uint64_t seed);

nlohmann::json to_json(const TomographyOutcome &outcome);

/// Writes `<stem>_rho.csv` and `<stem>_wigner.csv`.
void write_tomography_tables(const std::string &stem, const TomographyOutcome &outcome,
                             std::uint64_t fingerprint);

/// `simulate`: writes the QHT1 file (plus truth sidecar) and returns a short
/// summary.
nlohmann::json cmd_simulate(const RunConfig &config, const std::string &out_path);

enum class AnalyzeWhat { pca, quads, profile, corr };
AnalyzeWhat analyze_what_from_string(const std::string &name);

/// `analyze`: tables for one analysis step of a stored ensemble.
nlohmann::json cmd_analyze(AnalyzeWhat what, const std::string &ensemble_path, const RunConfig &config,
                           const std::string &out_dir);

/// `tomo`: JSON report at `out_path` and tables next to it.
nlohmann::json cmd_tomo(const std::string &quadrature_path, Channel channel, const RunConfig &config,
                        const std::string &out_path);

/// `reproduce`: simulate, filter, extract both channels, estimate the mode,
/// run tomography, and write every table plus summary.json to `out_dir`.
nlohmann::json cmd_reproduce(const RunConfig &config, const std::string &out_dir);

/// `stream`: long Poisson-herald stream through the causal filter; compares
/// latched outputs with the per-event channel.
nlohmann::json cmd_stream(const RunConfig &config, const std::string &out_dir);

}  // namespace rtquad
