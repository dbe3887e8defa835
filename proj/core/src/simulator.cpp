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

#include "rtquad/simulator.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <ios>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

namespace {

constexpr double kVacuumSigma = std::numbers::sqrt2 / 2;  // sqrt(1/2)

void fill_vacuum(Rng &rng, std::span<double> out) {
    boost::random::normal_distribution<double> normal(0.0, kVacuumSigma);
    for (double &v : out) {
        v = normal(rng);
    }
}

std::uint64_t fnv1a(const std::string &text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

TemporalMode ModeSpec::build() const {
    switch (kind) {
        case ModeKind::rising:
            if (gammas.size() != 1) {
                throw InvalidParameter("rising mode takes exactly one rate");
            }
            return make_rising(gammas[0], herald_time);
        case ModeKind::double_exponential:
            if (gammas.size() != 1) {
                throw InvalidParameter("double_exponential mode takes exactly one rate");
            }
            return make_double_exponential(gammas[0], herald_time);
        case ModeKind::multi_rising:
            return make_multi_rising(gammas, herald_time);
    }
    throw InvalidParameter("bad mode kind");
}

std::vector<double> default_gammas() {
    return {kDefaultHwhmToRate * 11e6, kDefaultHwhmToRate * 19e6, kDefaultHwhmToRate * 36e6};
}

void SimConfig::validate() const {
    grid.validate();
    (void)mode.build();
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw InvalidParameter("efficiency must lie in [0, 1]");
    }
    (void)source();
    if (n_events == 0) {
        throw InvalidParameter("n_events must be at least 1");
    }
    if (!(herald_rate >= 0.0) || !std::isfinite(herald_rate)) {
        throw InvalidParameter("herald_rate must be nonnegative");
    }
}

DensityDiagonal SimConfig::source() const {
    if (source_diagonal) {
        return DensityDiagonal(*source_diagonal);
    }
    return DensityDiagonal::lossy_single_photon(efficiency);
}

std::uint64_t SimConfig::fingerprint() const {
    std::ostringstream s;
    s << std::hexfloat;
    s << "mode=" << to_string(mode.kind) << ';';
    for (double g : mode.gammas) {
        s << g << ',';
    }
    s << ";t0=" << mode.herald_time << ";dt=" << grid.dt << ";n=" << grid.n_samples << ";h=" << grid.herald_index
      << ";eta=" << efficiency << ";src=";
    if (source_diagonal) {
        for (double w : *source_diagonal) {
            s << w << ',';
        }
    }
    s << ";events=" << n_events << ";rate=" << herald_rate << ";seed=" << seed << ";filter=" << to_string(filter.type)
      << ',';
    for (double r : filter.rates) {
        s << r << ',';
    }
    s << filter.rate_perturbation;
    return fnv1a(s.str());
}

SourceSampler::SourceSampler(const DensityDiagonal &weights) {
    const auto &w = weights.weights();
    double acc = 0.0;
    for (double p : w) {
        acc += p;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;

    envelope_bound_.assign(w.size(), 0.0);
    for (std::size_t n = 1; n < w.size(); ++n) {
        double var = static_cast<double>(n) + 1.0;
        double reach = std::sqrt(2.0 * static_cast<double>(n) + 1.0) + 8.0;
        double best = 0.0;
        for (double x = 0.0; x <= reach; x += 1e-2) {
            double psi = fock_wavefunction(n, x);
            double envelope = std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
            best = std::max(best, psi * psi / envelope);
        }
        envelope_bound_[n] = best * 1.01;
    }
}

SourceDraw SourceSampler::operator()(Rng &rng) const {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    SourceDraw draw;
    double u = uniform(rng);
    draw.photon_number = static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, u) - cumulative_.begin());
    const std::size_t n = draw.photon_number;
    if (n == 0) {
        boost::random::normal_distribution<double> normal(0.0, kVacuumSigma);
        draw.quadrature = normal(rng);
        return draw;
    }
    double var = static_cast<double>(n) + 1.0;
    boost::random::normal_distribution<double> proposal(0.0, std::sqrt(var));
    while (true) {
        double x = proposal(rng);
        double psi = fock_wavefunction(n, x);
        double envelope = std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
        if (uniform(rng) * envelope_bound_[n] * envelope <= psi * psi) {
            draw.quadrature = x;
            return draw;
        }
    }
}

double sample_source_quadrature(const DensityDiagonal &weights, Rng &rng) {
    return SourceSampler(weights)(rng).quadrature;
}

void embed_mode(std::span<const double> mode, double mode_quadrature, std::span<double> trace) noexcept {
    double projection = std::inner_product(mode.begin(), mode.end(), trace.begin(), 0.0);
    double shift = mode_quadrature - projection;
    for (std::size_t k = 0; k < mode.size(); ++k) {
        trace[k] += mode[k] * shift;
    }
}

HeraldedTrace synthesize_trace(const SampledMode &mode, double mode_quadrature, std::span<const double> vacuum) {
    if (vacuum.size() != mode.values.size()) {
        throw IncompatibleGrid("vacuum sample count does not match the mode grid");
    }
    HeraldedTrace t;
    t.samples.assign(vacuum.begin(), vacuum.end());
    t.herald_index = mode.grid.herald_index;
    t.truth.mode_quadrature = mode_quadrature;
    embed_mode(mode.values, mode_quadrature, t.samples);
    return t;
}

HeraldedTrace synthesize_trace(const SampledMode &mode, double mode_quadrature, Rng &rng) {
    std::vector<double> vacuum(mode.values.size());
    fill_vacuum(rng, vacuum);
    return synthesize_trace(mode, mode_quadrature, vacuum);
}

TraceEnsemble::TraceEnsemble(TimeGrid grid, std::size_t n_events, std::uint64_t fingerprint)
    : grid_(grid), n_events_(n_events), fingerprint_(fingerprint), samples_(n_events * grid.n_samples, 0.0) {
    grid_.validate();
}

std::span<const double> TraceEnsemble::trace(std::size_t i) const {
    if (i >= n_events_) {
        throw IndexError("event index out of range");
    }
    return std::span<const double>(samples_).subspan(i * grid_.n_samples, grid_.n_samples);
}

std::span<double> TraceEnsemble::trace(std::size_t i) {
    if (i >= n_events_) {
        throw IndexError("event index out of range");
    }
    return std::span<double>(samples_).subspan(i * grid_.n_samples, grid_.n_samples);
}

TraceEnsemble simulate_ensemble(const SimConfig &config) {
    config.validate();
    SampledMode mode = sample(config.mode.build(), config.grid);
    SourceSampler source(config.source());
    TraceEnsemble ensemble(config.grid, config.n_events, config.fingerprint());
    ensemble.truth().resize(config.n_events);
    for (std::size_t i = 0; i < config.n_events; ++i) {
        Rng rng = make_substream(config.seed, StreamTag::event, i);
        SourceDraw draw = source(rng);
        auto row = ensemble.trace(i);
        fill_vacuum(rng, row);
        embed_mode(mode.values, draw.quadrature, row);
        ensemble.truth()[i] = {i, draw.photon_number, draw.quadrature};
    }
    return ensemble;
}

StreamSource::StreamSource(const SimConfig &config, double duration) : seed_(config.seed), dt_(config.grid.dt) {
    config.validate();
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw InvalidParameter("stream duration must be positive");
    }
    total_ = static_cast<std::size_t>(std::llround(duration / dt_));
    pre_ = config.grid.herald_index;
    TemporalMode mode = config.mode.build();
    mode_ = sample(mode, config.grid).values;
    if (total_ < mode_.size()) {
        throw InvalidParameter("stream is shorter than one wavepacket window");
    }

    double overlap = config.herald_rate * 10.0 / mode.min_rate();
    if (overlap > 0.01) {
        std::ostringstream msg;
        msg << "herald_rate * 10/gamma_min = " << overlap << "; wavepackets will overlap";
        warnings_.push_back(msg.str());
    }

    // Heralds whose whole window fits in the stream.
    std::size_t first = pre_;
    std::size_t last = total_ - mode_.size() + pre_;
    if (config.herald_rate > 0.0) {
        Rng rng = make_substream(seed_, StreamTag::stream_heralds, 0);
        std::exponential_distribution<double> gap(config.herald_rate);
        double t = static_cast<double>(first) * dt_;
        while (true) {
            t += gap(rng);
            auto idx = static_cast<std::size_t>(std::llround(t / dt_));
            if (idx > last) {
                break;
            }
            if (!heralds_.empty() && idx == heralds_.back()) {
                continue;
            }
            heralds_.push_back(idx);
        }
    }
    SourceSampler source(config.source());
    for (std::size_t j = 0; j < heralds_.size(); ++j) {
        Rng rng = make_substream(seed_, StreamTag::stream_source, j);
        SourceDraw draw = source(rng);
        truth_.push_back({j, draw.photon_number, draw.quadrature});
    }
}

std::vector<double> StreamSource::herald_times() const {
    std::vector<double> out;
    out.reserve(heralds_.size());
    for (auto h : heralds_) {
        out.push_back(static_cast<double>(h) * dt_);
    }
    return out;
}

void StreamSource::generate_until(std::size_t end) {
    end = std::min(end, total_);
    while (generated_ < end) {
        std::size_t chunk = generated_ / kChunk;
        std::size_t len = std::min(kChunk, total_ - generated_);
        Rng rng = make_substream(seed_, StreamTag::stream_noise, chunk);
        std::size_t offset = buffer_.size();
        buffer_.resize(offset + len);
        fill_vacuum(rng, std::span<double>(buffer_).subspan(offset, len));
        generated_ += len;
    }
}

void StreamSource::apply_heralds_before(std::size_t window_start_limit) {
    while (next_herald_ < heralds_.size()) {
        std::size_t start = heralds_[next_herald_] - pre_;
        if (start >= window_start_limit) {
            break;
        }
        auto window = std::span<double>(buffer_).subspan(start - buffer_start_, mode_.size());
        embed_mode(mode_, truth_[next_herald_].mode_quadrature, window);
        ++next_herald_;
    }
}

std::size_t StreamSource::read(std::span<double> out) {
    if (emit_pos_ >= total_ || out.empty()) {
        return 0;
    }
    std::size_t count = std::min(out.size(), total_ - emit_pos_);
    std::size_t end = emit_pos_ + count;
    // Heralds starting before `end` may reach up to end + window length.
    generate_until(end + mode_.size());
    apply_heralds_before(end);
    std::copy_n(buffer_.begin() + static_cast<std::ptrdiff_t>(emit_pos_ - buffer_start_), count, out.begin());
    emit_pos_ = end;

    std::size_t consumed = emit_pos_ - buffer_start_;
    if (consumed > 4 * kChunk) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(consumed));
        buffer_start_ = emit_pos_;
    }
    return count;
}

}  // namespace rtquad
