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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "rtquad/error.hpp"
#include "rtquad/simulator.hpp"
#include "rtquad/temporal_modes.hpp"

namespace rtquad {
namespace {

constexpr double kGamma11 = 4 * std::numbers::pi * 11e6;

double numeric_overlap(const TemporalMode &f, const TemporalMode &g) {
    double slow = std::min(f.min_rate(), g.min_rate());
    double lo = std::min(f.herald_time(), g.herald_time()) - 80 / slow;
    double hi = std::max(f.herald_time(), g.herald_time()) + 80 / slow;
    return oracle::integrate_pieces([&](double t) { return f(t) * g(t); },
                                    {lo, f.herald_time(), g.herald_time(), hi}, 400);
}

TEST(TemporalModes, RisingIsNormalizedAcrossDecades) {
    for (double gamma : {1.0, 1e3, kGamma11, 1e10}) {
        TemporalMode f = make_rising(gamma, 0.0);
        EXPECT_NEAR(f.mass_between(-INFINITY, INFINITY), 1.0, 1e-9) << gamma;
        EXPECT_NEAR(numeric_overlap(f, f), 1.0, 1e-9) << gamma;
    }
}

TEST(TemporalModes, RisingAmplitudeOneOverE) {
    TemporalMode f = make_rising(kGamma11, 0.0);
    double t = -2 / kGamma11;
    EXPECT_NEAR(t, -14.4686e-9, 0.001e-9);
    EXPECT_NEAR(f(t) / f(0.0), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(f(t) * f(t) / (f(0.0) * f(0.0)), std::exp(-2.0), 1e-12);
    EXPECT_NEAR(f(0.0), std::sqrt(kGamma11), 1e-6 * std::sqrt(kGamma11));
}

TEST(TemporalModes, RisingIsExactlyZeroAfterHerald) {
    TemporalMode f = make_multi_rising(default_gammas(), 3e-9);
    EXPECT_EQ(f(3e-9 + 1e-15), 0.0);
    EXPECT_EQ(f(1.0), 0.0);
    EXPECT_GT(f(3e-9 - 1e-9), 0.0);
}

TEST(TemporalModes, DoubleExponentialNormAndSymmetry) {
    TemporalMode g = make_double_exponential(kGamma11, 1e-9);
    EXPECT_NEAR(g.mass_between(-INFINITY, INFINITY), 1.0, 1e-12);
    EXPECT_NEAR(numeric_overlap(g, g), 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(g(1e-9 + 5e-9), g(1e-9 - 5e-9));
}

TEST(TemporalModes, RisingAgainstDoubleExponential) {
    TemporalMode f = make_rising(kGamma11);
    TemporalMode g = make_double_exponential(kGamma11);
    EXPECT_NEAR(inner_product(f, g), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(numeric_overlap(f, g), 1 / std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(mode_match(f, g), 0.5, 1e-12);
}

TEST(TemporalModes, RisingRateMismatchOverlap) {
    TemporalMode f = make_rising(kGamma11);
    TemporalMode g = make_rising(3 * kGamma11);
    EXPECT_NEAR(inner_product(f, g), std::sqrt(3.0) / 2, 1e-12);
    EXPECT_NEAR(numeric_overlap(f, g), std::sqrt(3.0) / 2, 1e-9);
}

TEST(TemporalModes, ShiftOverlapLaw) {
    for (double gamma : {2.0, kGamma11}) {
        for (double shift_units : {0.0, 0.1, 1.0, 3.7}) {
            double delta = shift_units / gamma;
            TemporalMode f = make_rising(gamma, 0.0);
            TemporalMode g = f.shifted_to(delta);
            double expected = std::exp(-gamma * std::abs(delta) / 2);
            EXPECT_NEAR(inner_product(f, g), expected, 1e-6);
            EXPECT_NEAR(numeric_overlap(f, g), expected, 1e-6);
        }
    }
}

TEST(TemporalModes, CyclicCoefficientsMatchResidues) {
    std::vector<double> gammas{1.0, 2.0, 3.0};
    std::vector<double> c = cyclic_coefficients(gammas);
    ASSERT_EQ(c.size(), 3u);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_NEAR(c[n], oracle::partial_fraction_residue(gammas, n), 1e-6);
    }
    EXPECT_NEAR(c[0], 0.5, 1e-12);
    EXPECT_NEAR(c[1], -1.0, 1e-12);
    EXPECT_NEAR(c[2], 0.5, 1e-12);

    std::vector<double> ref_rates = default_gammas();
    std::vector<double> cp = cyclic_coefficients(ref_rates);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_NEAR(cp[n] / oracle::partial_fraction_residue(ref_rates, n), 1.0, 1e-6);
    }
}

TEST(TemporalModes, MultiRisingIsNormalized) {
    TemporalMode f = make_multi_rising(default_gammas());
    EXPECT_NEAR(f.mass_between(-INFINITY, INFINITY), 1.0, 1e-12);
    EXPECT_NEAR(numeric_overlap(f, f), 1.0, 1e-8);
    EXPECT_EQ(f.kind(), ModeKind::multi_rising);
}

TEST(TemporalModes, SingleRateMultiRisingReducesToRising) {
    std::vector<double> one{kGamma11};
    TemporalMode a = make_multi_rising(one, 0.0);
    TemporalMode b = make_rising(kGamma11, 0.0);
    for (double t = -100e-9; t <= 5e-9; t += 0.7e-9) {
        EXPECT_NEAR(a(t), b(t), 1e-12 * b(0.0));
    }
}

TEST(TemporalModes, ParameterErrors) {
    std::vector<double> degenerate{1e8, 1e8 * (1 + 1e-9), 3e8};
    EXPECT_THROW(make_multi_rising(degenerate), DegeneratePoles);
    EXPECT_THROW(cyclic_coefficients(degenerate), DegeneratePoles);
    EXPECT_THROW(make_rising(0.0), InvalidParameter);
    EXPECT_THROW(make_rising(-1.0), InvalidParameter);
    EXPECT_THROW(make_double_exponential(std::nan("")), InvalidParameter);
    std::vector<double> empty;
    EXPECT_THROW(make_multi_rising(empty), InvalidParameter);
    std::vector<double> negative{1e8, -2e8};
    EXPECT_THROW(make_multi_rising(negative), InvalidParameter);
}

TEST(TemporalModes, SampledModeProperties) {
    TimeGrid grid{};
    SampledMode s = sample(make_multi_rising(default_gammas()), grid);
    ASSERT_EQ(s.values.size(), grid.n_samples);
    double norm = 0.0;
    for (double v : s.values) {
        norm += v * v;
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    for (std::size_t k = grid.herald_index + 1; k < grid.n_samples; ++k) {
        EXPECT_EQ(s.values[k], 0.0);
    }
    // Smooth cascade mode: zero at the herald, peaked shortly before it.
    EXPECT_NEAR(s.values[grid.herald_index], 0.0, 1e-12);
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        if (s.values[k] > s.values[argmax]) {
            argmax = k;
        }
    }
    EXPECT_LT(argmax, grid.herald_index);
    EXPECT_GT(argmax, grid.herald_index - 100);
    EXPECT_LT(s.truncated_mass, 1e-10);

    SampledMode single = sample(make_rising(kGamma11), grid);
    argmax = 0;
    for (std::size_t k = 0; k < single.values.size(); ++k) {
        if (single.values[k] > single.values[argmax]) {
            argmax = k;
        }
    }
    EXPECT_EQ(argmax, grid.herald_index);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(TemporalModes, ShortWindowWarnsAboutTruncation) {
    TimeGrid grid{0.4e-9, 40, 20};
    SampledMode s = sample(make_rising(kGamma11), grid);
    EXPECT_GT(s.truncated_mass, 1e-3);
    EXPECT_FALSE(s.warnings.empty());
}

TEST(TemporalModes, SampledInnerProductNeedsSameGrid) {
    SampledMode a = sample(make_rising(kGamma11), TimeGrid{});
    SampledMode b = sample(make_rising(kGamma11), TimeGrid{0.4e-9, 1000, 500});
    EXPECT_THROW(inner_product(a, b), IncompatibleGrid);
    EXPECT_NEAR(mode_match(a, a), 1.0, 1e-12);
}

TEST(TemporalModes, SampledOverlapApproachesContinuous) {
    TemporalMode f = make_rising(kGamma11);
    TemporalMode g = make_double_exponential(kGamma11);
    double previous = INFINITY;
    for (double dt : {0.4e-9, 0.1e-9, 0.025e-9}) {
        auto n = static_cast<std::size_t>(1e-6 / dt);
        TimeGrid grid{dt, n, n / 2};
        double err = std::abs(inner_product(sample(f, grid), sample(g, grid)) - inner_product(f, g));
        EXPECT_LT(err, previous / 3);
        previous = err;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(TemporalModes, GridValidation) {
    EXPECT_THROW((TimeGrid{0.0, 10, 5}).validate(), InvalidParameter);
    EXPECT_THROW((TimeGrid{1e-9, 0, 0}).validate(), InvalidParameter);
    EXPECT_THROW((TimeGrid{1e-9, 10, 10}).validate(), InvalidParameter);
    EXPECT_NO_THROW(TimeGrid{}.validate());
}

}  // namespace
}  // namespace rtquad
