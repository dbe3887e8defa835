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
#include <string>
#include <vector>

#include "rtquad/analysis.hpp"
#include "rtquad/simulator.hpp"
#include "rtquad/tomography.hpp"

namespace rtquad {

struct AnalysisSettings {
    BinSpec histogram{};
    PcaOptions pca{};
};

struct TomographySettings {
    std::size_t cutoff = 8;
    MleOptions mle{};
    std::size_t bootstrap = 100;
    /// Wigner section table: radii 0, step, 2 step, ... up to max.
    double wigner_max_radius = 3.0;
    double wigner_step = 0.05;
};

/// Everything one run needs. The simulation block carries the seed and the
/// filter specification as well.
struct RunConfig {
    SimConfig simulation{};
    AnalysisSettings analysis{};
    TomographySettings tomography{};
    std::string output_dir = "rtquad_out";
    double stream_duration = 1.0;

    void validate() const;
    std::uint64_t fingerprint() const;
};

/// Built-in presets. "reference": three-cavity mode at 11/19/36 MHz HWHM,
/// 1250 samples at 0.4 ns, 18,491 events, eta = 0.785, 1,800 heralds/s.
RunConfig preset(const std::string &name);
std::vector<std::string> preset_names();

/// Parses and validates. Unknown keys and missing sections are reported
/// together in one ConfigError.
RunConfig parse_config(const nlohmann::json &doc);
RunConfig parse_config_text(const std::string &text);
RunConfig load_config(const std::string &path);

nlohmann::json to_json(const RunConfig &config);

}  // namespace rtquad
