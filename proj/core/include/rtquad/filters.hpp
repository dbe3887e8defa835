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
#include <span>
#include <string>
#include <vector>

#include "rtquad/temporal_modes.hpp"

namespace rtquad {

/// Continuous-time causal low-pass filter made of one-pole stages.
///
/// The impulse response is h(tau) = gain * sum_n c_n exp(-r_n tau) for
/// tau >= 0, with stage rates r_n = gamma_n / 2 and the partial-fraction
/// weights c_n of the gamma_n. The gain makes int h^2 = 1, so filtered vacuum
/// keeps variance 1/2.
class PoleCascade {
   public:
    explicit PoleCascade(std::span<const double> gammas);

    /// Mode rates gamma_n (1/s).
    const std::vector<double> &gammas() const noexcept {
        return gammas_;
    }
    /// Per-stage decay rates gamma_n / 2 (1/s).
    std::vector<double> stage_rates() const;
    const std::vector<double> &coefficients() const noexcept {
        return coefficients_;
    }
    double overall_gain() const noexcept {
        return gain_;
    }
    std::size_t order() const noexcept {
        return gammas_.size();
    }

    /// Closed-form h(tau); zero for tau < 0.
    double operator()(double tau) const noexcept;

    /// Rates scaled by (1 + fraction * (-1)^n), emulating analog component
    /// tolerance with alternating signs.
    PoleCascade perturbed(double fraction) const;

   private:
    std::vector<double> gammas_;
    std::vector<double> coefficients_;
    double gain_;
};

/// Time-reversal of a rising-kind mode. Throws UnsupportedMode otherwise.
PoleCascade design_matched_filter(const TemporalMode &mode);

/// Exponential-sum expansion of the sequential composition (convolution) of
/// one-pole responses exp(-r_n tau), built one stage at a time. Returns
/// (stage rate, weight) pairs.
std::vector<ExpTerm> compose_stages(std::span<const double> stage_rates);

/// h(k dt) for k = 0..n_samples-1 as a unit-norm sampled sequence. The
/// returned grid keeps dt and n_samples and puts the herald at index 0.
SampledMode impulse_response(const PoleCascade &cascade, const TimeGrid &grid);

/// The mode measured by reading the filter output at the grid herald:
/// w(t_k) = h(t_herald - t_k), unit-normalized.
SampledMode weighting_function(const PoleCascade &cascade, const TimeGrid &grid);

/// Exact-pole discretization in parallel (partial-fraction) form:
/// s_n[k] = a_n s_n[k-1] + x[k], y[k] = b * sum_n w_n s_n[k].
struct DiscretizedFilter {
    std::vector<double> decay;    ///< a_n = exp(-gamma_n dt / 2)
    std::vector<double> weights;  ///< partial-fraction weights, max |w_n| = 1
    double input_gain = 1.0;      ///< b
    double dt = 0.0;

    std::size_t order() const noexcept {
        return decay.size();
    }
    /// Samples needed before outputs are free of start-up transients
    /// (10 / gamma_min).
    std::size_t warmup_samples() const;
};

DiscretizedFilter discretize(const PoleCascade &cascade, double dt);

/// Streaming state. One trace per state.
struct FilterState {
    std::vector<double> accumulators;
    std::size_t samples_consumed = 0;

    explicit FilterState(const DiscretizedFilter &filter) : accumulators(filter.order(), 0.0) {
    }
};

/// Consumes x_k and returns y_k. O(order) work.
inline double step(FilterState &state, const DiscretizedFilter &filter, double x) noexcept {
    double y = 0.0;
    const std::size_t m = filter.decay.size();
    for (std::size_t n = 0; n < m; ++n) {
        double s = filter.decay[n] * state.accumulators[n] + x;
        state.accumulators[n] = s;
        y += filter.weights[n] * s;
    }
    ++state.samples_consumed;
    return filter.input_gain * y;
}

/// Streams a block through `state`. out.size() must equal in.size().
void filter_block(FilterState &state, const DiscretizedFilter &filter, std::span<const double> in,
                  std::span<double> out);

/// Batch filtering from a zero initial state.
std::vector<double> filter_trace(std::span<const double> trace, const DiscretizedFilter &filter);

/// The filtered sample at the herald: the real-time quadrature.
double realtime_quadrature(std::span<const double> filtered_trace, std::size_t herald_index);

enum class FilterType { matched, first_order, custom };

std::string to_string(FilterType type);
FilterType filter_type_from_string(const std::string &name);

/// Filter choice as it appears in run configurations.
struct FilterSpec {
    FilterType type = FilterType::matched;
    /// Rates for `custom`; optional single rate for `first_order`
    /// (defaults to the mode's slowest rate).
    std::vector<double> rates;
    double rate_perturbation = 0.0;
};

PoleCascade build_filter(const FilterSpec &spec, const TemporalMode &mode);

}  // namespace rtquad
