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

// Randomized invariant checks. Each property runs over a batch of generated
// cases from a fixed seed; failures print the case so it can be replayed.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rtquad/filters.hpp"
#include "rtquad/io.hpp"
#include "rtquad/rng.hpp"
#include "rtquad/simulator.hpp"
#include "rtquad/tomography.hpp"

namespace rtquad {
namespace {

constexpr std::size_t kCases = 40;

class Gen {
   public:
    explicit Gen(std::uint64_t salt) : rng_(substream_key(2024, StreamTag::test, salt)) {
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    double normal() {
        return std::normal_distribution<double>()(rng_);
    }
    /// 1..4 well-separated rates such that gamma dt / 2 stays below 0.5.
    std::vector<double> rates(double dt) {
        std::size_t n = index(1, 4);
        std::vector<double> out;
        double r = uniform(0.005, 0.05) / dt;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(r);
            r *= uniform(1.3, 2.2);
        }
        return out;
    }
    std::vector<double> signal(std::size_t n) {
        std::vector<double> x(n);
        for (double &v : x) {
            v = normal();
        }
        return x;
    }
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (double &v : w) {
            v = -std::log(uniform(1e-12, 1.0));
            sum += v;
        }
        for (double &v : w) {
            v /= sum;
        }
        return w;
    }
    Rng &engine() {
        return rng_;
    }

   private:
    Rng rng_;
};

TEST(Property, FilterIsCausal) {
    Gen gen(1);
    const double dt = 0.4e-9;
    for (std::size_t c = 0; c < kCases; ++c) {
        std::vector<double> gammas = gen.rates(dt);
        DiscretizedFilter d = discretize(PoleCascade(gammas), dt);
        std::vector<double> x = gen.signal(gen.index(50, 3000));
        std::size_t k = gen.index(0, x.size() - 2);
        std::vector<double> y = filter_trace(x, d);
        for (std::size_t i = k + 1; i < x.size(); ++i) {
            x[i] = gen.normal() * 100;
        }
        std::vector<double> y2 = filter_trace(x, d);
        for (std::size_t i = 0; i <= k; ++i) {
            ASSERT_EQ(y[i], y2[i]) << "case " << c << " k " << k << " i " << i;
        }
    }
}

TEST(Property, FilterIsLinear) {
    Gen gen(2);
    const double dt = 0.4e-9;
    for (std::size_t c = 0; c < kCases; ++c) {
        DiscretizedFilter d = discretize(PoleCascade(gen.rates(dt)), dt);
        std::size_t n = gen.index(10, 2000);
        std::vector<double> a = gen.signal(n);
        std::vector<double> b = gen.signal(n);
        double alpha = gen.uniform(-3, 3);
        double beta = gen.uniform(-3, 3);
        std::vector<double> mix(n);
        for (std::size_t i = 0; i < n; ++i) {
            mix[i] = alpha * a[i] + beta * b[i];
        }
        std::vector<double> ya = filter_trace(a, d);
        std::vector<double> yb = filter_trace(b, d);
        std::vector<double> ym = filter_trace(mix, d);
        for (std::size_t i = 0; i < n; ++i) {
            double expected = alpha * ya[i] + beta * yb[i];
            double scale = std::abs(alpha * ya[i]) + std::abs(beta * yb[i]) + 1e-300;
            ASSERT_LE(std::abs(ym[i] - expected), 1e-12 * std::max(scale, 1.0)) << "case " << c << " i " << i;
        }
    }
}

TEST(Property, FilterHasUnitEnergyAndMatchesComposition) {
    Gen gen(3);
    const double dt = 0.4e-9;
    for (std::size_t c = 0; c < kCases; ++c) {
        std::vector<double> gammas = gen.rates(dt);
        PoleCascade h(gammas);
        double slow = *std::min_element(gammas.begin(), gammas.end());
        double energy = oracle::integrate([&](double t) { return h(t) * h(t); }, 0.0, 80 / slow, 400);
        ASSERT_NEAR(energy, 1.0, 1e-8) << "case " << c;

        std::vector<ExpTerm> composed = compose_stages(h.stage_rates());
        double t_probe = gen.uniform(0.1, 10) / slow;
        double closed = 0.0;
        for (const ExpTerm &term : composed) {
            closed += term.coefficient * std::exp(-term.rate * t_probe);
        }
        double t_ref = 1.0 / slow;
        double closed_ref = 0.0;
        for (const ExpTerm &term : composed) {
            closed_ref += term.coefficient * std::exp(-term.rate * t_ref);
        }
        ASSERT_NEAR(closed / closed_ref, h(t_probe) / h(t_ref), 1e-9 * std::max(1.0, std::abs(h(t_probe) / h(t_ref))))
            << "case " << c;
    }
}

TEST(Property, ShiftedRisingOverlap) {
    Gen gen(4);
    for (std::size_t c = 0; c < kCases; ++c) {
        double gamma = std::pow(10.0, gen.uniform(0, 10));
        double delta = gen.uniform(-5, 5) / gamma;
        TemporalMode f = make_rising(gamma, 0.0);
        ASSERT_NEAR(inner_product(f, f.shifted_to(delta)), std::exp(-gamma * std::abs(delta) / 2), 1e-6)
            << "case " << c;
    }
}

TEST(Property, EmIsMonotoneAndPhysical) {
    Gen gen(5);
    for (std::size_t c = 0; c < 12; ++c) {
        std::vector<double> truth = gen.simplex(gen.index(1, 4));
        oracle::TabulatedQuadratureSampler sampler(truth);
        std::vector<double> xs(gen.index(100, 4000));
        for (double &x : xs) {
            x = sampler(gen.engine());
        }
        std::size_t cutoff = gen.index(1, 10);
        double previous = -INFINITY;
        MleResult r = mle_diagonal(xs, FockBasis(cutoff), MleOptions{300, 1e-12},
                                   [&](std::size_t it, std::span<const double> w, double ll) {
                                       ASSERT_GE(ll, previous - 1e-12) << "case " << c << " iteration " << it;
                                       previous = ll;
                                       double sum = 0.0;
                                       for (double v : w) {
                                           ASSERT_TRUE(std::isfinite(v) && v >= 0.0) << "case " << c;
                                           sum += v;
                                       }
                                       ASSERT_NEAR(sum, 1.0, 1e-12) << "case " << c;
                                   });
        ASSERT_EQ(r.monotonicity_violations, 0u) << "case " << c;
        ASSERT_EQ(r.rho.weights().size(), cutoff + 1);
    }
}

TEST(Property, WignerIntegratesToOne) {
    Gen gen(6);
    for (std::size_t c = 0; c < kCases; ++c) {
        DensityDiagonal rho(gen.simplex(gen.index(1, 11)));
        double total = 2 * std::numbers::pi *
                       oracle::integrate([&](double r) { return wigner(rho, r, 0.0) * r; }, 0.0, 14.0, 400);
        ASSERT_NEAR(total, 1.0, 1e-6) << "case " << c;
        double series = 0.0;
        for (std::size_t n = 0; n < rho.weights().size(); ++n) {
            series += (n % 2 == 0 ? 1.0 : -1.0) * rho[n];
        }
        ASSERT_NEAR(wigner_origin(rho), series / std::numbers::pi, 1e-12);
        ASSERT_NEAR(wigner(rho, 0.0, 0.0), wigner_origin(rho), 1e-12);
    }
}

TEST(Property, SimulationIsSeedDeterministic) {
    Gen gen(7);
    for (std::size_t c = 0; c < 10; ++c) {
        SimConfig cfg;
        cfg.seed = gen.index(0, 1u << 30);
        cfg.n_events = gen.index(1, 30);
        std::size_t n = gen.index(200, 600);
        cfg.grid = TimeGrid{0.4e-9, n, gen.index(150, n - 1)};
        cfg.efficiency = gen.uniform(0, 1);
        TraceEnsemble a = simulate_ensemble(cfg);
        TraceEnsemble b = simulate_ensemble(cfg);
        ASSERT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin())) << "case " << c;
        ASSERT_EQ(a.fingerprint(), b.fingerprint());
    }
}

TEST(Property, EnsembleFilesRoundTrip) {
    Gen gen(8);
    auto dir = std::filesystem::temp_directory_path() / "rtquad_property";
    std::filesystem::create_directories(dir);
    for (std::size_t c = 0; c < 10; ++c) {
        std::size_t n = gen.index(2, 300);
        TimeGrid grid{gen.uniform(1e-10, 1e-8), n, gen.index(0, n - 1)};
        TraceEnsemble ens(grid, gen.index(1, 40), gen.index(0, ~std::size_t{0}));
        for (double &v : ens.data()) {
            v = gen.normal() * std::pow(10.0, gen.uniform(-300, 300));
        }
        std::string path = (dir / ("case" + std::to_string(c) + ".qht")).string();
        write_ensemble(path, ens);
        TraceEnsemble back = read_ensemble(path);
        ASSERT_EQ(back.grid(), grid) << "case " << c;
        ASSERT_EQ(back.fingerprint(), ens.fingerprint());
        ASSERT_TRUE(std::equal(ens.data().begin(), ens.data().end(), back.data().begin())) << "case " << c;
    }
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rtquad
