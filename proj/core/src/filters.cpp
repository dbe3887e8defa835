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

#include "rtquad/filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

PoleCascade::PoleCascade(std::span<const double> gammas)
    : gammas_(gammas.begin(), gammas.end()), coefficients_(cyclic_coefficients(gammas)), gain_(1.0) {
    double energy = 0.0;
    for (std::size_t n = 0; n < gammas_.size(); ++n) {
        for (std::size_t m = 0; m < gammas_.size(); ++m) {
            energy += coefficients_[n] * coefficients_[m] / ((gammas_[n] + gammas_[m]) / 2);
        }
    }
    if (!(energy > 0.0)) {
        throw InvalidParameter("cascade impulse response has zero energy");
    }
    gain_ = 1.0 / std::sqrt(energy);
}

std::vector<double> PoleCascade::stage_rates() const {
    std::vector<double> out;
    for (double g : gammas_) {
        out.push_back(g / 2);
    }
    return out;
}

double PoleCascade::operator()(double tau) const noexcept {
    if (tau < 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < gammas_.size(); ++n) {
        sum += coefficients_[n] * std::exp(-gammas_[n] * tau / 2);
    }
    return gain_ * sum;
}

PoleCascade PoleCascade::perturbed(double fraction) const {
    if (!(std::abs(fraction) < 1.0)) {
        throw InvalidParameter("rate perturbation must be within (-1, 1)");
    }
    std::vector<double> rates = gammas_;
    for (std::size_t n = 0; n < rates.size(); ++n) {
        rates[n] *= 1.0 + (n % 2 == 0 ? fraction : -fraction);
    }
    return PoleCascade(rates);
}

PoleCascade design_matched_filter(const TemporalMode &mode) {
    if (!mode.is_rising()) {
        throw UnsupportedMode("matched causal filter needs a rising-kind mode, got " + to_string(mode.kind()));
    }
    auto rates = mode.rates();
    return PoleCascade(rates);
}

std::vector<ExpTerm> compose_stages(std::span<const double> stage_rates) {
    if (stage_rates.empty()) {
        throw InvalidParameter("at least one stage is required");
    }
    // exp(-p tau) * exp(-q tau) = (exp(-p tau) - exp(-q tau)) / (q - p)
    std::vector<ExpTerm> acc{{stage_rates[0], 1.0}};
    for (std::size_t s = 1; s < stage_rates.size(); ++s) {
        double q = stage_rates[s];
        double q_weight = 0.0;
        for (auto &term : acc) {
            double diff = q - term.rate;
            if (std::abs(diff) < 1e-6 * std::max(q, term.rate)) {
                throw DegeneratePoles("stage rates must be pairwise distinct");
            }
            term.coefficient /= diff;
            q_weight -= term.coefficient;
        }
        acc.push_back({q, q_weight});
    }
    return acc;
}

SampledMode impulse_response(const PoleCascade &cascade, const TimeGrid &grid) {
    grid.validate();
    std::vector<double> values(grid.n_samples);
    for (std::size_t k = 0; k < grid.n_samples; ++k) {
        values[k] = cascade(static_cast<double>(k) * grid.dt);
    }
    TimeGrid causal = grid;
    causal.herald_index = 0;
    return make_sampled(causal, std::move(values));
}

SampledMode weighting_function(const PoleCascade &cascade, const TimeGrid &grid) {
    grid.validate();
    std::vector<double> values(grid.n_samples);
    for (std::size_t k = 0; k < grid.n_samples; ++k) {
        values[k] = cascade(-grid.time(k));
    }
    return make_sampled(grid, std::move(values));
}

std::size_t DiscretizedFilter::warmup_samples() const {
    // a_n = exp(-gamma_n dt / 2)  =>  gamma_n = -2 ln(a_n) / dt
    double slowest = *std::max_element(decay.begin(), decay.end());
    double gamma_min = -2.0 * std::log(slowest) / dt;
    return static_cast<std::size_t>(std::ceil(10.0 / (gamma_min * dt)));
}

DiscretizedFilter discretize(const PoleCascade &cascade, double dt) {
    if (!(dt > 0.0)) {
        throw InvalidParameter("dt must be positive");
    }
    DiscretizedFilter f;
    f.dt = dt;
    double cmax = 0.0;
    for (double c : cascade.coefficients()) {
        cmax = std::max(cmax, std::abs(c));
    }
    for (std::size_t n = 0; n < cascade.order(); ++n) {
        double r = cascade.gammas()[n] / 2;
        if (!(r * dt < 0.5)) {
            std::ostringstream msg;
            msg << "stage rate " << r << "/s is not resolved by dt = " << dt << " s (rate*dt must be < 0.5)";
            throw UndersampledFilter(msg.str());
        }
        f.decay.push_back(std::exp(-r * dt));
        f.weights.push_back(cascade.coefficients()[n] / cmax);
    }

    // Calibrate b numerically: sum the squared unit-gain impulse response
    // until the geometric tail bound is negligible.
    double energy = 0.0;
    double slowest = *std::max_element(f.decay.begin(), f.decay.end());
    double weight_sum = 0.0;
    for (double w : f.weights) {
        weight_sum += std::abs(w);
    }
    std::vector<double> powers(f.order(), 1.0);
    for (std::size_t j = 0;; ++j) {
        double u = 0.0;
        for (std::size_t n = 0; n < f.order(); ++n) {
            u += f.weights[n] * powers[n];
            powers[n] *= f.decay[n];
        }
        energy += u * u;
        double bound = weight_sum * std::pow(slowest, static_cast<double>(j + 1));
        if (j > 16 && bound * bound / (1.0 - slowest * slowest) < 1e-18 * energy) {
            break;
        }
    }
    f.input_gain = 1.0 / std::sqrt(energy);
    return f;
}

void filter_block(FilterState &state, const DiscretizedFilter &filter, std::span<const double> in,
                  std::span<double> out) {
    if (in.size() != out.size()) {
        throw InvalidParameter("filter_block: input and output sizes differ");
    }
    for (std::size_t k = 0; k < in.size(); ++k) {
        out[k] = step(state, filter, in[k]);
    }
}

std::vector<double> filter_trace(std::span<const double> trace, const DiscretizedFilter &filter) {
    FilterState state(filter);
    std::vector<double> out(trace.size());
    filter_block(state, filter, trace, out);
    return out;
}

double realtime_quadrature(std::span<const double> filtered_trace, std::size_t herald_index) {
    if (herald_index >= filtered_trace.size()) {
        std::ostringstream msg;
        msg << "herald index " << herald_index << " outside trace of length " << filtered_trace.size();
        throw IndexError(msg.str());
    }
    return filtered_trace[herald_index];
}

std::string to_string(FilterType type) {
    switch (type) {
        case FilterType::matched:
            return "matched";
        case FilterType::first_order:
            return "first-order";
        case FilterType::custom:
            return "custom";
    }
    return "?";
}

FilterType filter_type_from_string(const std::string &name) {
    if (name == "matched") {
        return FilterType::matched;
    }
    if (name == "first-order" || name == "first_order") {
        return FilterType::first_order;
    }
    if (name == "custom") {
        return FilterType::custom;
    }
    throw InvalidParameter("unknown filter type '" + name + "' (expected matched, first-order or custom)");
}

PoleCascade build_filter(const FilterSpec &spec, const TemporalMode &mode) {
    auto base = [&]() -> PoleCascade {
        switch (spec.type) {
            case FilterType::matched:
                return design_matched_filter(mode);
            case FilterType::first_order: {
                if (spec.rates.size() > 1) {
                    throw InvalidParameter("first-order filter takes at most one rate");
                }
                double rate = spec.rates.empty() ? mode.min_rate() : spec.rates.front();
                return PoleCascade(std::span<const double>(&rate, 1));
            }
            case FilterType::custom:
                if (spec.rates.empty()) {
                    throw InvalidParameter("custom filter needs at least one rate");
                }
                return PoleCascade(spec.rates);
        }
        throw InvalidParameter("bad filter type");
    }();
    if (spec.rate_perturbation != 0.0) {
        return base.perturbed(spec.rate_perturbation);
    }
    return base;
}

}  // namespace rtquad
