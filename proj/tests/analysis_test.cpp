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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "rtquad/analysis.hpp"
#include "rtquad/error.hpp"
#include "rtquad/simulator.hpp"

namespace rtquad {
namespace {

constexpr double kGamma11 = 4 * std::numbers::pi * 11e6;

double variance(const std::vector<double> &xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) {
        s += (x - mean) * (x - mean);
    }
    return s / static_cast<double>(xs.size() - 1);
}

SimConfig config_on(TimeGrid grid, std::size_t events, double eta = 0.785) {
    SimConfig cfg;
    cfg.grid = grid;
    cfg.n_events = events;
    cfg.efficiency = eta;
    return cfg;
}

/// Expected leading-eigenvector error 1 - |<e, f>|^2 for n samples and N
/// traces, from first-order perturbation of the sample covariance.
double expected_pca_deficit(std::size_t n, std::size_t events, double eta) {
    return static_cast<double>(n - 1) * 0.5 * (0.5 + eta) / (static_cast<double>(events) * eta * eta);
}

TEST(Analysis, PostprocessRecoversEmbeddedValue) {
    SimConfig cfg = config_on(TimeGrid{}, 100);
    TraceEnsemble ens = simulate_ensemble(cfg);
    SampledMode f = sample(cfg.mode.build(), cfg.grid);
    QuadratureSet q = postprocessed_quadratures(ens, f);
    ASSERT_EQ(q.size(), 100u);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(q.values[i], ens.truth()[i].mode_quadrature, 1e-12);
        EXPECT_EQ(q.event_ids[i], i);
    }
    EXPECT_EQ(q.fingerprint, ens.fingerprint());
    SampledMode other = sample(cfg.mode.build(), TimeGrid{0.4e-9, 100, 50});
    EXPECT_THROW(postprocessed_quadratures(ens, other), IncompatibleGrid);
}

TEST(Analysis, VacuumEnsembleHasVacuumVariance) {
    SimConfig cfg = config_on(TimeGrid{}, 20000, 0.0);
    TraceEnsemble ens = simulate_ensemble(cfg);
    SampledMode f = sample(cfg.mode.build(), cfg.grid);
    double v = variance(postprocessed_quadratures(ens, f).values);
    EXPECT_NEAR(v, 0.5, 4 * 0.5 * std::sqrt(2.0 / 20000));
    DiscretizedFilter d = discretize(build_filter(cfg.filter, cfg.mode.build()), cfg.grid.dt);
    double vr = variance(realtime_quadratures(ens, d).values);
    EXPECT_NEAR(vr, 0.5, 4 * 0.5 * std::sqrt(2.0 / 20000));
}

TEST(Analysis, ShiftedModeLosesOverlap) {
    SimConfig cfg = config_on(TimeGrid{}, 20000);
    cfg.mode = ModeSpec{ModeKind::rising, {kGamma11}, 0.0};
    TraceEnsemble ens = simulate_ensemble(cfg);
    for (double shift : {0.0, 5e-9, 14.4e-9}) {
        SampledMode g = sample(make_rising(kGamma11, -shift), cfg.grid);
        double v = variance(postprocessed_quadratures(ens, g).values);
        double expected = 0.5 + cfg.efficiency * std::exp(-kGamma11 * shift);
        EXPECT_NEAR(v, expected, 4 * std::sqrt(2.2 / 20000)) << shift;
    }
}

TEST(Analysis, PcaRecoversNoiselessMode) {
    TimeGrid grid{0.4e-9, 300, 250};
    SampledMode f = sample(make_multi_rising(default_gammas()), grid);
    TraceEnsemble ens(grid, 50, 0);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        double x = std::sin(1.3 * static_cast<double>(i)) + 0.2;
        sum_sq += x * x;
        auto tr = ens.trace(i);
        for (std::size_t k = 0; k < grid.n_samples; ++k) {
            tr[k] = x * f.values[k];
        }
    }
    PcaResult r = pca_mode_estimate(ens);
    EXPECT_GT(mode_match(r.mode, f), 1 - 1e-12);
    EXPECT_NEAR(r.eigenvalue, sum_sq / 50.0, 1e-10);
    EXPECT_GT(inner_product(r.mode, f), 0.0);
    EXPECT_TRUE(r.converged);
}

TEST(Analysis, PcaNoiseMatchesPerturbationTheory) {
    TimeGrid grid{1.6e-9, 100, 90};
    SampledMode f = sample(make_multi_rising(default_gammas()), grid);
    for (double eta : {0.3, 0.785}) {
        SimConfig cfg = config_on(grid, 20000, eta);
        TraceEnsemble ens = simulate_ensemble(cfg);
        PcaResult r = pca_mode_estimate(ens, &f);
        double deficit = 1 - mode_match(r.mode, f);
        double expected = expected_pca_deficit(grid.n_samples, cfg.n_events, eta);
        EXPECT_LT(deficit, 2 * expected) << eta;
        EXPECT_GT(deficit, 0.3 * expected) << eta;
        EXPECT_NEAR(r.eigenvalue, 0.5 + eta, 0.05) << eta;
        EXPECT_GT(inner_product(r.mode, f), 0.0);
    }
}

TEST(Analysis, PcaNeedsData) {
    TimeGrid grid{0.4e-9, 100, 50};
    TraceEnsemble one(grid, 1, 0);
    EXPECT_THROW(pca_mode_estimate(one), InsufficientData);
    SimConfig cfg = config_on(grid, 50);
    PcaResult r = pca_mode_estimate(simulate_ensemble(cfg));
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Analysis, AutocorrelationStructure) {
    TimeGrid grid{4e-9, 40, 35};
    SampledMode f = sample(make_multi_rising(default_gammas()), grid);
    SimConfig cfg = config_on(grid, 40000);
    std::vector<double> c = autocorrelation(simulate_ensemble(cfg));
    const std::size_t n = grid.n_samples;
    const double events = static_cast<double>(cfg.n_events);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            double expected = (j == k ? 0.5 : 0.0) + cfg.efficiency * f.values[j] * f.values[k];
            double cjj = 0.5 + cfg.efficiency * f.values[j] * f.values[j];
            double ckk = 0.5 + cfg.efficiency * f.values[k] * f.values[k];
            double sigma = std::sqrt((cjj * ckk + expected * expected) / events);
            EXPECT_NEAR(c[j * n + k], expected, 5.5 * sigma) << j << "," << k;
            EXPECT_EQ(c[j * n + k], c[k * n + j]);
        }
    }
}

TEST(Analysis, SingleRateVarianceProfile) {
    TimeGrid grid{};
    SimConfig cfg = config_on(grid, 18491);
    cfg.mode = ModeSpec{ModeKind::rising, {kGamma11}, 0.0};
    TraceEnsemble ens = simulate_ensemble(cfg);
    DiscretizedFilter d = discretize(build_filter(cfg.filter, cfg.mode.build()), grid.dt);
    VarianceProfile p = variance_profile(ens, d);
    ASSERT_EQ(p.variance.size(), grid.n_samples);
    EXPECT_EQ(p.first_valid, d.warmup_samples());

    std::size_t worst = p.first_valid;
    double worst_z = 0.0;
    std::size_t outside = 0;
    for (std::size_t k = p.first_valid; k < grid.n_samples; ++k) {
        double tau = grid.time(k);
        double expected = 0.5 + cfg.efficiency * std::exp(-kGamma11 * std::abs(tau));
        double z = std::abs(p.variance[k] - expected) / p.std_error[k];
        outside += z > 3;
        if (z > worst_z) {
            worst_z = z;
            worst = k;
        }
    }
    EXPECT_LT(worst_z, 5.0) << "at sample " << worst;
    EXPECT_LT(static_cast<double>(outside), 0.02 * static_cast<double>(grid.n_samples - p.first_valid));

    auto peak = std::max_element(p.variance.begin(), p.variance.end());
    EXPECT_EQ(static_cast<std::size_t>(peak - p.variance.begin()), grid.herald_index);
    double tail = p.variance[grid.herald_index + 400];
    EXPECT_NEAR(tail, 0.5, 5 * p.std_error[grid.herald_index + 400]);
}

TEST(Analysis, ProfileNeedsTwoTraces) {
    TimeGrid grid{0.4e-9, 100, 50};
    TraceEnsemble one(grid, 1, 0);
    DiscretizedFilter d = discretize(PoleCascade(default_gammas()), grid.dt);
    EXPECT_THROW(variance_profile(one, d), InsufficientData);
    DiscretizedFilter other = discretize(PoleCascade(default_gammas()), 0.2e-9);
    TraceEnsemble two(grid, 2, 0);
    EXPECT_THROW(variance_profile(two, other), IncompatibleGrid);
}

TEST(Analysis, PearsonBasics) {
    std::vector<double> a{1.0, 2.0, 4.0, 3.0, 8.0};
    std::vector<double> neg;
    for (double v : a) {
        neg.push_back(-2 * v + 1);
    }
    EXPECT_NEAR(pearson_correlation(a, a), 1.0, 1e-15);
    EXPECT_NEAR(pearson_correlation(a, neg), -1.0, 1e-15);
    std::vector<double> shorter{1.0, 2.0};
    EXPECT_THROW(pearson_correlation(a, shorter), InvalidParameter);
    std::vector<double> flat(5, 3.0);
    EXPECT_THROW(pearson_correlation(a, flat), InvalidParameter);
    std::vector<double> single{1.0};
    EXPECT_THROW(pearson_correlation(single, single), InsufficientData);

    QuadratureSet qa{Channel::realtime, {0, 1, 2, 3, 4}, a, 0};
    QuadratureSet qb{Channel::postprocessed, {0, 1, 2, 3, 5}, a, 0};
    EXPECT_THROW(pearson_correlation(qa, qb), InvalidParameter);
}

TEST(Analysis, MatchedAndPerturbedChannelsCorrelate) {
    SimConfig cfg = config_on(TimeGrid{}, 4000);
    TraceEnsemble ens = simulate_ensemble(cfg);
    TemporalMode mode = cfg.mode.build();
    QuadratureSet post = postprocessed_quadratures(ens, sample(mode, cfg.grid));
    DiscretizedFilter exact = discretize(design_matched_filter(mode), cfg.grid.dt);
    DiscretizedFilter off = discretize(design_matched_filter(mode).perturbed(0.05), cfg.grid.dt);
    EXPECT_GT(pearson_correlation(realtime_quadratures(ens, exact), post), 0.999);
    EXPECT_GT(pearson_correlation(realtime_quadratures(ens, off), post), 0.99);
}

TEST(Analysis, RealtimeChannelVariance) {
    SimConfig cfg = config_on(TimeGrid{}, 18491);
    TraceEnsemble ens = simulate_ensemble(cfg);
    DiscretizedFilter d = discretize(build_filter(cfg.filter, cfg.mode.build()), cfg.grid.dt);
    QuadratureSet rt = realtime_quadratures(ens, d);
    EXPECT_NEAR(variance(rt.values), 1.285, 4 * std::sqrt(2.2 / 18491));
    EXPECT_EQ(rt.channel, Channel::realtime);
}

TEST(Analysis, HistogramBinning) {
    BinSpec spec{10, 0.0, 1.0};
    std::vector<double> xs;
    for (std::size_t i = 0; i < 1000; ++i) {
        xs.push_back((static_cast<double>(i) + 0.5) / 1000.0);
    }
    xs.push_back(-0.1);
    xs.push_back(1.0);
    Histogram h = histogram(xs, spec);
    for (auto c : h.counts) {
        EXPECT_EQ(c, 100u);
    }
    EXPECT_EQ(h.underflow, 1u);
    EXPECT_EQ(h.overflow, 1u);
    EXPECT_EQ(h.total(), 1002u);
    std::vector<double> empty;
    EXPECT_THROW(histogram(empty, spec), InsufficientData);
    EXPECT_THROW(histogram(xs, BinSpec{0, 0.0, 1.0}), InvalidParameter);
    EXPECT_THROW(histogram(xs, BinSpec{10, 1.0, 1.0}), InvalidParameter);
}

TEST(Analysis, QuadratureHistogramFitsAnalyticDensity) {
    SimConfig cfg = config_on(TimeGrid{}, 18491);
    TraceEnsemble ens = simulate_ensemble(cfg);
    QuadratureSet q = postprocessed_quadratures(ens, sample(cfg.mode.build(), cfg.grid));
    BinSpec spec{41, -4.1, 4.1};
    Histogram h = histogram(q.values, spec);
    double chi2 = 0.0;
    std::size_t dof = 0;
    for (std::size_t i = 0; i < spec.bins; ++i) {
        double lo = spec.lo + spec.width() * static_cast<double>(i);
        double p = oracle::integrate(
            [&](double x) {
                double p0 = oracle::fock_explicit(0, x);
                double p1 = oracle::fock_explicit(1, x);
                return (1 - cfg.efficiency) * p0 * p0 + cfg.efficiency * p1 * p1;
            },
            lo, lo + spec.width(), 4);
        double expected = p * static_cast<double>(q.size());
        if (expected > 5) {
            double d = static_cast<double>(h.counts[i]) - expected;
            chi2 += d * d / expected;
            ++dof;
        }
    }
    EXPECT_LT(chi2 / static_cast<double>(dof), 2.0);
}

TEST(Analysis, JointAndTimeResolvedHistograms) {
    SimConfig cfg = config_on(TimeGrid{0.4e-9, 400, 300}, 500);
    TraceEnsemble ens = simulate_ensemble(cfg);
    DiscretizedFilter d = discretize(build_filter(cfg.filter, cfg.mode.build()), cfg.grid.dt);
    TimeResolvedHistogram t = time_resolved_histogram(ens, d, BinSpec{21, -6, 6});
    ASSERT_EQ(t.n_times, cfg.grid.n_samples);
    ASSERT_EQ(t.counts.size(), t.n_times * 21);
    for (std::size_t k = 0; k < t.n_times; ++k) {
        std::uint64_t total = 0;
        for (std::size_t j = 0; j < 21; ++j) {
            total += t.counts[k * 21 + j];
        }
        EXPECT_LE(total, 500u);
        EXPECT_GE(total, 495u);
    }
    std::vector<double> a{0.0, 1.0, 2.0, 10.0};
    std::vector<double> b{0.0, -1.0, 2.0, 0.0};
    JointHistogram j = joint_histogram(a, b, BinSpec{5, -2.5, 2.5});
    EXPECT_EQ(std::accumulate(j.counts.begin(), j.counts.end(), std::uint64_t{0}), 3u);
    EXPECT_EQ(j.counts[2 * 5 + 2], 1u);
    EXPECT_EQ(j.counts[3 * 5 + 1], 1u);
    EXPECT_EQ(j.counts[4 * 5 + 4], 1u);
}

TEST(Analysis, EstimatorsIgnoreEventOrder) {
    SimConfig cfg = config_on(TimeGrid{0.4e-9, 300, 250}, 1000);
    TraceEnsemble ens = simulate_ensemble(cfg);
    TraceEnsemble shuffled(cfg.grid, ens.size(), ens.fingerprint());
    for (std::size_t i = 0; i < ens.size(); ++i) {
        auto src = ens.trace((i * 389) % ens.size());
        std::copy(src.begin(), src.end(), shuffled.trace(i).begin());
    }
    SampledMode f = sample(cfg.mode.build(), cfg.grid);
    PcaResult a = pca_mode_estimate(ens, &f);
    PcaResult b = pca_mode_estimate(shuffled, &f);
    EXPECT_NEAR(mode_match(a.mode, b.mode), 1.0, 1e-9);
    EXPECT_NEAR(a.eigenvalue, b.eigenvalue, 1e-9);
    DiscretizedFilter d = discretize(build_filter(cfg.filter, cfg.mode.build()), cfg.grid.dt);
    VarianceProfile pa = variance_profile(ens, d);
    VarianceProfile pb = variance_profile(shuffled, d);
    for (std::size_t k = 0; k < pa.variance.size(); ++k) {
        EXPECT_NEAR(pa.variance[k], pb.variance[k], 1e-12);
    }
    std::vector<double> qa = postprocessed_quadratures(ens, f).values;
    std::vector<double> qb = postprocessed_quadratures(shuffled, f).values;
    std::sort(qa.begin(), qa.end());
    std::sort(qb.begin(), qb.end());
    EXPECT_EQ(qa, qb);
}

TEST(Analysis, ChannelNames) {
    EXPECT_EQ(channel_from_string("realtime"), Channel::realtime);
    EXPECT_EQ(channel_from_string(to_string(Channel::postprocessed)), Channel::postprocessed);
    EXPECT_THROW(channel_from_string("x"), InvalidParameter);
}

}  // namespace
}  // namespace rtquad
