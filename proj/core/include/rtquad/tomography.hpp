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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rtquad {

/// Harmonic-oscillator eigenfunction psi_n(x) in the convention where the
/// vacuum quadrature variance is 1/2. Evaluated by the stable three-term
/// recurrence, never through explicit Hermite polynomials.
double fock_wavefunction(std::size_t n, double x);

/// psi_0(x)..psi_{out.size()-1}(x) in one recurrence pass.
void fock_wavefunctions(double x, std::span<double> out);

/// Laguerre polynomial L_n(z) by recurrence.
double laguerre(std::size_t n, double z);

struct FockBasis {
    std::size_t cutoff = 8;

    explicit FockBasis(std::size_t n_max = 8);
    std::size_t dimension() const noexcept {
        return cutoff + 1;
    }
};

/// Fock-diagonal density matrix: nonnegative weights summing to one.
class DensityDiagonal {
   public:
    /// Validates and renormalizes. Throws InvalidParameter on negative or
    /// non-finite entries, or a sum that is not within 1e-6 of one.
    explicit DensityDiagonal(std::vector<double> weights);

    static DensityDiagonal fock(std::size_t n, std::size_t cutoff);
    /// eta |1><1| + (1 - eta) |0><0|.
    static DensityDiagonal lossy_single_photon(double eta);

    const std::vector<double> &weights() const noexcept {
        return weights_;
    }
    double operator[](std::size_t n) const noexcept {
        return n < weights_.size() ? weights_[n] : 0.0;
    }
    std::size_t cutoff() const noexcept {
        return weights_.size() - 1;
    }

    /// Phase-averaged quadrature density sum_n rho_nn |psi_n(x)|^2.
    double quadrature_density(double x) const;

   private:
    std::vector<double> weights_;
};

struct MleOptions {
    std::size_t max_iters = 2000;
    /// Stop once the mean log-likelihood changes by less than this.
    double tol = 1e-10;
};

struct MleResult {
    DensityDiagonal rho{std::vector<double>{1.0}};
    std::size_t iterations = 0;
    bool converged = false;
    double final_delta = 0.0;
    double mean_log_likelihood = 0.0;
    /// Iterations whose log-likelihood dropped by more than 1e-12.
    std::size_t monotonicity_violations = 0;
    std::vector<std::string> warnings;
};

/// Called after every EM update with the iteration number, the updated
/// weights and the mean log-likelihood of the weights before the update.
using MleObserver = std::function<void(std::size_t, std::span<const double>, double)>;

/// Maximum-likelihood Fock-diagonal state from phase-randomized quadrature
/// samples, by the multiplicative expectation-maximization iteration
/// rho_n <- rho_n * mean_i(|psi_n(x_i)|^2 / P(x_i)), starting uniform.
MleResult mle_diagonal(std::span<const double> samples, const FockBasis &basis, const MleOptions &options = {},
                       const MleObserver &observer = {});

/// W(x, p) = (1/pi) sum_n rho_nn (-1)^n exp(-(x^2+p^2)) L_n(2(x^2+p^2)).
double wigner(const DensityDiagonal &rho, double x, double p);

/// Section through the origin along p = 0.
std::vector<double> wigner_section(const DensityDiagonal &rho, std::span<const double> radii);

/// Closed form W(0,0) = (1/pi) sum_n (-1)^n rho_nn.
double wigner_origin(const DensityDiagonal &rho);

struct BootstrapSummary {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t replicas = 0;
};

using Estimator = std::function<std::vector<double>(std::span<const double>)>;

/// Resamples `samples` with replacement `replicas` times (replica r uses its
/// own substream of `seed`) and reports element-wise mean and sample standard
/// deviation of the estimator outputs.
BootstrapSummary bootstrap(std::span<const double> samples, const Estimator &estimator, std::size_t replicas,
                           std::uint64_t seed);

}  // namespace rtquad
