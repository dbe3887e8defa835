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

#include "rtquad/temporal_modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One-sided exponential piece amp * exp(+-rate (t - anchor)) supported on
/// (-inf, anchor] (left) or (anchor, +inf) (right). `rate` here is the
/// amplitude rate gamma / 2.
struct Piece {
    bool left;
    double rate;
    double amp;
    double anchor;
};

std::vector<Piece> pieces_of(ModeKind kind, const std::vector<ExpTerm> &terms, double t0, double norm) {
    std::vector<Piece> out;
    for (const auto &term : terms) {
        out.push_back({true, term.rate / 2, norm * term.coefficient, t0});
        if (kind == ModeKind::double_exponential) {
            out.push_back({false, term.rate / 2, norm * term.coefficient, t0});
        }
    }
    return out;
}

/// Integral of the product of two pieces over [lo, hi].
double pair_integral(const Piece &a, const Piece &b, double lo, double hi) {
    double x = lo;
    double y = hi;
    if (a.left) {
        y = std::min(y, a.anchor);
    } else {
        x = std::max(x, a.anchor);
    }
    if (b.left) {
        y = std::min(y, b.anchor);
    } else {
        x = std::max(x, b.anchor);
    }
    if (!(x < y)) {
        return 0.0;
    }
    double ka = a.left ? a.rate : -a.rate;
    double kb = b.left ? b.rate : -b.rate;
    double k = ka + kb;
    auto g = [&](double t) {
        return std::exp(ka * (t - a.anchor) + kb * (t - b.anchor));
    };
    double scale = a.amp * b.amp;
    if (k == 0.0) {
        // Left and right pieces of equal rate: the product is constant.
        return scale * g(x) * (y - x);
    }
    double gy = std::isinf(y) ? 0.0 : g(y);
    double gx = std::isinf(x) ? 0.0 : g(x);
    return scale * (gy - gx) / k;
}

double pieces_inner(const std::vector<Piece> &f, const std::vector<Piece> &g, double lo, double hi) {
    double total = 0.0;
    for (const auto &a : f) {
        for (const auto &b : g) {
            total += pair_integral(a, b, lo, hi);
        }
    }
    return total;
}

void require_positive_rate(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        std::ostringstream msg;
        msg << "mode rate must be positive and finite, got " << gamma;
        throw InvalidParameter(msg.str());
    }
}

}  // namespace

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidParameter("grid dt must be positive");
    }
    if (n_samples == 0 || herald_index >= n_samples) {
        std::ostringstream msg;
        msg << "grid herald_index " << herald_index << " outside [0, " << n_samples << ")";
        throw InvalidParameter(msg.str());
    }
}

std::string to_string(ModeKind kind) {
    switch (kind) {
        case ModeKind::rising:
            return "rising";
        case ModeKind::double_exponential:
            return "double_exponential";
        case ModeKind::multi_rising:
            return "multi_rising";
    }
    return "?";
}

ModeKind mode_kind_from_string(const std::string &name) {
    if (name == "rising") {
        return ModeKind::rising;
    }
    if (name == "double_exponential") {
        return ModeKind::double_exponential;
    }
    if (name == "multi_rising") {
        return ModeKind::multi_rising;
    }
    throw InvalidParameter("unknown mode kind '" + name + "'");
}

std::vector<double> cyclic_coefficients(std::span<const double> gammas) {
    if (gammas.empty()) {
        throw InvalidParameter("at least one rate is required");
    }
    for (double g : gammas) {
        require_positive_rate(g);
    }
    std::vector<double> c(gammas.size());
    for (std::size_t n = 0; n < gammas.size(); ++n) {
        double prod = 1.0;
        for (std::size_t m = 0; m < gammas.size(); ++m) {
            if (m == n) {
                continue;
            }
            double diff = gammas[m] - gammas[n];
            if (std::abs(diff) < 1e-6 * std::max(gammas[m], gammas[n])) {
                std::ostringstream msg;
                msg << "rates " << gammas[n] << " and " << gammas[m] << " are degenerate";
                throw DegeneratePoles(msg.str());
            }
            prod *= diff;
        }
        c[n] = 1.0 / prod;
    }
    return c;
}

TemporalMode::TemporalMode(ModeKind kind, std::vector<ExpTerm> terms, double t0)
    : kind_(kind), terms_(std::move(terms)), t0_(t0), norm_(1.0) {
    if (!std::isfinite(t0)) {
        throw InvalidParameter("herald time must be finite");
    }
    auto unit = pieces_of(kind_, terms_, t0_, 1.0);
    double mass = pieces_inner(unit, unit, -kInf, kInf);
    if (!(mass > 0.0)) {
        throw InvalidParameter("mode has zero norm");
    }
    norm_ = 1.0 / std::sqrt(mass);
}

std::vector<double> TemporalMode::rates() const {
    std::vector<double> out;
    for (const auto &t : terms_) {
        out.push_back(t.rate);
    }
    return out;
}

std::vector<double> TemporalMode::coefficients() const {
    std::vector<double> out;
    for (const auto &t : terms_) {
        out.push_back(t.coefficient);
    }
    return out;
}

double TemporalMode::min_rate() const {
    auto r = rates();
    return *std::min_element(r.begin(), r.end());
}

double TemporalMode::max_rate() const {
    auto r = rates();
    return *std::max_element(r.begin(), r.end());
}

double TemporalMode::operator()(double t) const noexcept {
    double tau = t - t0_;
    if (kind_ == ModeKind::double_exponential) {
        const auto &term = terms_.front();
        return norm_ * term.coefficient * std::exp(-term.rate * std::abs(tau) / 2);
    }
    if (tau > 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto &term : terms_) {
        sum += term.coefficient * std::exp(term.rate * tau / 2);
    }
    return norm_ * sum;
}

TemporalMode TemporalMode::shifted_to(double t0) const {
    TemporalMode copy = *this;
    if (!std::isfinite(t0)) {
        throw InvalidParameter("herald time must be finite");
    }
    copy.t0_ = t0;
    return copy;
}

double TemporalMode::mass_between(double lo, double hi) const {
    auto p = pieces_of(kind_, terms_, t0_, norm_);
    return pieces_inner(p, p, lo, hi);
}

TemporalMode make_rising(double gamma, double t0) {
    require_positive_rate(gamma);
    return TemporalMode(ModeKind::rising, {{gamma, 1.0}}, t0);
}

TemporalMode make_double_exponential(double gamma, double t0) {
    require_positive_rate(gamma);
    return TemporalMode(ModeKind::double_exponential, {{gamma, 1.0}}, t0);
}

TemporalMode make_multi_rising(std::span<const double> gammas, double t0) {
    auto c = cyclic_coefficients(gammas);
    std::vector<ExpTerm> terms;
    for (std::size_t n = 0; n < gammas.size(); ++n) {
        terms.push_back({gammas[n], c[n]});
    }
    return TemporalMode(gammas.size() == 1 ? ModeKind::rising : ModeKind::multi_rising, std::move(terms), t0);
}

SampledMode make_sampled(const TimeGrid &grid, std::vector<double> values) {
    grid.validate();
    if (values.size() != grid.n_samples) {
        throw IncompatibleGrid("sample count does not match grid");
    }
    double ss = 0.0;
    for (double v : values) {
        ss += v * v;
    }
    if (!(ss > 0.0) || !std::isfinite(ss)) {
        throw InvalidParameter("sampled mode has zero or non-finite norm");
    }
    double scale = 1.0 / std::sqrt(ss);
    for (double &v : values) {
        v *= scale;
    }
    SampledMode out;
    out.grid = grid;
    out.values = std::move(values);
    return out;
}

SampledMode sample(const TemporalMode &mode, const TimeGrid &grid) {
    grid.validate();
    std::vector<double> values(grid.n_samples);
    double root_dt = std::sqrt(grid.dt);
    for (std::size_t k = 0; k < grid.n_samples; ++k) {
        values[k] = mode(grid.time(k)) * root_dt;
    }
    SampledMode out = make_sampled(grid, std::move(values));

    double first = grid.time(0);
    double last = grid.time(grid.n_samples - 1);
    out.truncated_mass = mode.mass_between(-kInf, first) + mode.mass_between(last, kInf);

    double margin = 10.0 / mode.min_rate();
    bool short_before = first > mode.herald_time() - margin;
    bool short_after = !mode.is_rising() && last < mode.herald_time() + margin;
    if (short_before || short_after) {
        std::ostringstream msg;
        msg << "window covers less than 10/gamma_min around the herald; truncated mass " << out.truncated_mass;
        out.warnings.push_back(msg.str());
    }
    return out;
}

double inner_product(const TemporalMode &f, const TemporalMode &g) {
    auto pf = pieces_of(f.kind(), f.terms(), f.herald_time(), f.norm_constant());
    auto pg = pieces_of(g.kind(), g.terms(), g.herald_time(), g.norm_constant());
    return pieces_inner(pf, pg, -kInf, kInf);
}

double inner_product(const SampledMode &f, const SampledMode &g) {
    if (!(f.grid == g.grid) || f.values.size() != g.values.size()) {
        throw IncompatibleGrid("sampled modes live on different grids");
    }
    return std::inner_product(f.values.begin(), f.values.end(), g.values.begin(), 0.0);
}

double mode_match(const TemporalMode &f, const TemporalMode &g) {
    double ip = inner_product(f, g);
    return std::clamp(ip * ip, 0.0, 1.0);
}

double mode_match(const SampledMode &f, const SampledMode &g) {
    double ip = inner_product(f, g);
    return std::clamp(ip * ip, 0.0, 1.0);
}

}  // namespace rtquad
