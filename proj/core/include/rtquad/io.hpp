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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtquad/analysis.hpp"
#include "rtquad/filters.hpp"
#include "rtquad/simulator.hpp"
#include "rtquad/temporal_modes.hpp"

namespace rtquad {

/// QHT1 ensemble files. All fields little-endian:
///
///   offset  size  field
///   0       4     tag "QHT1"
///   4       4     version (uint32, currently 1)
///   8       8     dt in seconds (IEEE-754 binary64)
///   16      8     n_samples (uint64)
///   24      8     herald_index (uint64)
///   32      8     n_events (uint64)
///   40      8     config fingerprint (uint64)
///   48      ...   n_events * n_samples binary64 samples, row-major
inline constexpr std::uint32_t kEnsembleFormatVersion = 1;
inline constexpr std::size_t kEnsembleHeaderBytes = 48;

void write_ensemble(const std::string &path, const TraceEnsemble &ensemble);

/// Reads an ensemble. When `with_truth` is set and `<path>.truth.csv` exists,
/// the truth records are loaded too.
TraceEnsemble read_ensemble(const std::string &path, bool with_truth = false);

std::string truth_sidecar_path(const std::string &ensemble_path);
void write_truth(const std::string &path, std::span<const TruthRecord> truth);
std::vector<TruthRecord> read_truth(const std::string &path);

/// CSV columns event_id,<channel>,<channel>... Sets must pair the same ids.
void write_quadratures(const std::string &path, std::span<const QuadratureSet> sets);
/// Reads one channel. A file with a single value column is accepted for any
/// channel name.
QuadratureSet read_quadratures(const std::string &path, Channel channel);

/// Plain numeric CSV, one column per header entry. Report tables start with
/// a `# fingerprint <hex>` comment line; readers here skip `#` lines.
void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &columns, std::optional<std::uint64_t> fingerprint = {});

void write_json(const std::string &path, const nlohmann::json &doc);

/// {kind, gammas, coefficients, t0, norm}.
nlohmann::json mode_record(const TemporalMode &mode);
TemporalMode mode_from_record(const nlohmann::json &record);
nlohmann::json filter_record(const PoleCascade &cascade, const DiscretizedFilter &discrete);

std::string hex_fingerprint(std::uint64_t fingerprint);

}  // namespace rtquad
