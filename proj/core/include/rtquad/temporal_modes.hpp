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
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace rtquad {

/// Conversion from a Lorentzian half width at half maximum (Hz) to the mode
/// decay rate gamma (1/s): gamma = 4 pi HWHM, so the power spectrum of the
/// mode has the quoted HWHM.
inline constexpr double kDefaultHwhmToRate = 4.0 * std::numbers::pi;

/// Uniform sampling grid around a herald. Sample k sits at time
/// (k - herald_index) * dt, so the herald is at t = 0.
struct TimeGrid {
    double dt = 0.4e-9;
    std::size_t n_samples = 1250;
    std::size_t herald_index = 625;

    void validate() const;
    double time(std::size_t k) const noexcept {
        return (static_cast<double>(k) - static_cast<double>(herald_index)) * dt;
    }
    double duration() const noexcept {
        return static_cast<double>(n_samples) * dt;
    }
    bool operator==(const TimeGrid &) const = default;
};

enum class ModeKind { rising, double_exponential, multi_rising };

std::string to_string(ModeKind kind);
ModeKind mode_kind_from_string(const std::string &name);

/// One exponential component: rate gamma (1/s) and its unnormalized weight.
struct ExpTerm {
    double rate;
    double coefficient;
};

/// Analytic temporal mode built from exponentials around a herald time t0.
///
/// Rising kinds are f(t) = N * sum_n c_n exp(gamma_n (t - t0) / 2) for t <= t0
/// and exactly zero afterwards. The double exponential is
/// sqrt(gamma/2) exp(-gamma |t - t0| / 2). Every mode has unit L2 norm.
class TemporalMode {
   public:
    ModeKind kind() const noexcept {
        return kind_;
    }
    const std::vector<ExpTerm> &terms() const noexcept {
        return terms_;
    }
    double herald_time() const noexcept {
        return t0_;
    }
    double norm_constant() const noexcept {
        return norm_;
    }
    std::vector<double> rates() const;
    std::vector<double> coefficients() const;
    double min_rate() const;
    double max_rate() const;
    bool is_rising() const noexcept {
        return kind_ != ModeKind::double_exponential;
    }

    double operator()(double t) const noexcept;

    /// Same shape, herald moved to t0.
    TemporalMode shifted_to(double t0) const;

    /// Closed-form integral of f(t)^2 over [lo, hi].
    double mass_between(double lo, double hi) const;

    friend TemporalMode make_rising(double gamma, double t0);
    friend TemporalMode make_double_exponential(double gamma, double t0);
    friend TemporalMode make_multi_rising(std::span<const double> gammas, double t0);

   private:
    TemporalMode(ModeKind kind, std::vector<ExpTerm> terms, double t0);

    ModeKind kind_;
    std::vector<ExpTerm> terms_;
    double t0_;
    double norm_;
};

TemporalMode make_rising(double gamma, double t0 = 0.0);
TemporalMode make_double_exponential(double gamma, double t0 = 0.0);
TemporalMode make_multi_rising(std::span<const double> gammas, double t0 = 0.0);

/// Partial-fraction weights c_n = 1 / prod_{m != n} (gamma_m - gamma_n).
/// Throws DegeneratePoles when two rates are closer than 1e-6 relative.
std::vector<double> cyclic_coefficients(std::span<const double> gammas);

/// Per-bin amplitudes f(t_k) sqrt(dt), renormalized over the window.
struct SampledMode {
    TimeGrid grid;
    std::vector<double> values;
    /// Continuous mass of the mode falling outside the sampled window.
    double truncated_mass = 0.0;
    std::vector<std::string> warnings;

    std::span<const double> span() const noexcept {
        return values;
    }
};

SampledMode sample(const TemporalMode &mode, const TimeGrid &grid);

/// Wraps an arbitrary vector as a unit-norm sampled mode on `grid`.
SampledMode make_sampled(const TimeGrid &grid, std::vector<double> values);

double inner_product(const TemporalMode &f, const TemporalMode &g);
double inner_product(const SampledMode &f, const SampledMode &g);

double mode_match(const TemporalMode &f, const TemporalMode &g);
double mode_match(const SampledMode &f, const SampledMode &g);

}  // namespace rtquad
