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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtquad/filters.hpp"
#include "rtquad/rng.hpp"
#include "rtquad/temporal_modes.hpp"
#include "rtquad/tomography.hpp"

namespace rtquad {

/// Mode family and rates as configured.
struct ModeSpec {
    ModeKind kind = ModeKind::multi_rising;
    std::vector<double> gammas;  ///< 1/s
    double herald_time = 0.0;

    TemporalMode build() const;
};

/// Rates of the heralded photon with the default cavity bandwidths
/// (11, 19 and 36 MHz HWHM) and the 4 pi HWHM-to-rate convention.
std::vector<double> default_gammas();

struct SimConfig {
    ModeSpec mode{ModeKind::multi_rising, default_gammas(), 0.0};
    TimeGrid grid{};
    double efficiency = 0.785;
    /// Source Fock weights. Empty means {1 - eta, eta}.
    std::optional<std::vector<double>> source_diagonal;
    std::size_t n_events = 18491;
    double herald_rate = 1800.0;  ///< heralds per second in stream mode
    std::uint64_t seed = 18491;
    FilterSpec filter{};

    void validate() const;
    DensityDiagonal source() const;
    /// FNV-1a hash of a canonical text rendering of every field.
    std::uint64_t fingerprint() const;
};

/// One source draw: the Fock number picked from the weights and the mode
/// quadrature sampled from |psi_n(x)|^2.
struct SourceDraw {
    std::size_t photon_number = 0;
    double quadrature = 0.0;
};

/// Draws phase-randomized quadratures of a Fock-diagonal state. Fock number
/// n >= 1 is sampled by rejection against a N(0, n + 1) envelope.
class SourceSampler {
   public:
    explicit SourceSampler(const DensityDiagonal &weights);
    SourceDraw operator()(Rng &rng) const;

   private:
    std::vector<double> cumulative_;
    std::vector<double> envelope_bound_;
};

double sample_source_quadrature(const DensityDiagonal &weights, Rng &rng);

/// Hidden ground truth of one event. Never read by the analysis chain.
struct TruthRecord {
    std::uint64_t event_id = 0;
    std::size_t photon_number = 0;
    double mode_quadrature = 0.0;
};

struct HeraldedTrace {
    std::vector<double> samples;
    std::size_t herald_index = 0;
    std::uint64_t event_id = 0;
    TruthRecord truth;
};

/// Replaces the component of `trace` along the unit vector `mode` with
/// `mode_quadrature`, leaving every orthogonal component untouched.
void embed_mode(std::span<const double> mode, double mode_quadrature, std::span<double> trace) noexcept;

/// Builds a trace from explicit vacuum samples: x = v + f (X_f - <f, v>).
HeraldedTrace synthesize_trace(const SampledMode &mode, double mode_quadrature, std::span<const double> vacuum);

/// Same, drawing the vacuum v_k ~ N(0, 1/2) from `rng`.
HeraldedTrace synthesize_trace(const SampledMode &mode, double mode_quadrature, Rng &rng);

/// Per-event traces on a shared grid, stored row-major.
class TraceEnsemble {
   public:
    TraceEnsemble() = default;
    TraceEnsemble(TimeGrid grid, std::size_t n_events, std::uint64_t fingerprint);

    const TimeGrid &grid() const noexcept {
        return grid_;
    }
    std::size_t size() const noexcept {
        return n_events_;
    }
    std::uint64_t fingerprint() const noexcept {
        return fingerprint_;
    }
    std::span<const double> trace(std::size_t i) const;
    std::span<double> trace(std::size_t i);
    std::span<const double> data() const noexcept {
        return samples_;
    }
    std::span<double> data() noexcept {
        return samples_;
    }
    /// Empty when the ensemble was loaded without its sidecar.
    const std::vector<TruthRecord> &truth() const noexcept {
        return truth_;
    }
    std::vector<TruthRecord> &truth() noexcept {
        return truth_;
    }

   private:
    TimeGrid grid_{};
    std::size_t n_events_ = 0;
    std::uint64_t fingerprint_ = 0;
    std::vector<double> samples_;
    std::vector<TruthRecord> truth_;
};

/// Event i depends only on (config, i): its source draw and noise come from
/// substream i of the seed.
TraceEnsemble simulate_ensemble(const SimConfig &config);

/// Continuous homodyne stream with Poisson heralds, produced in chronological
/// order with bounded memory. Each herald embeds one wavepacket, placed
/// relative to the herald exactly as on the per-event grid.
class StreamSource {
   public:
    StreamSource(const SimConfig &config, double duration);

    std::size_t total_samples() const noexcept {
        return total_;
    }
    double dt() const noexcept {
        return dt_;
    }
    const std::vector<std::size_t> &herald_indices() const noexcept {
        return heralds_;
    }
    std::vector<double> herald_times() const;
    const std::vector<TruthRecord> &truth() const noexcept {
        return truth_;
    }
    const std::vector<std::string> &warnings() const noexcept {
        return warnings_;
    }
    std::size_t position() const noexcept {
        return emit_pos_;
    }

    /// Fills `out` with the next samples. Returns how many were written;
    /// zero once the stream is exhausted.
    std::size_t read(std::span<double> out);

   private:
    void generate_until(std::size_t end);
    void apply_heralds_before(std::size_t window_start_limit);

    static constexpr std::size_t kChunk = std::size_t{1} << 16;

    std::uint64_t seed_;
    double dt_;
    std::size_t total_;
    std::size_t pre_;     ///< window samples before (and including) the herald
    std::vector<double> mode_;
    std::vector<std::size_t> heralds_;
    std::vector<TruthRecord> truth_;
    std::vector<std::string> warnings_;

    std::vector<double> buffer_;
    std::size_t buffer_start_ = 0;
    std::size_t generated_ = 0;
    std::size_t emit_pos_ = 0;
    std::size_t next_herald_ = 0;
};

}  // namespace rtquad
