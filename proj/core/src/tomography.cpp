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

#include "rtquad/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rtquad/error.hpp"
#include "rtquad/rng.hpp"

namespace rtquad {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

}  // namespace

void fock_wavefunctions(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    out[0] = kPiQuarter * std::exp(-x * x / 2);
    if (out.size() > 1) {
        out[1] = std::numbers::sqrt2 * x * out[0];
    }
    for (std::size_t n = 1; n + 1 < out.size(); ++n) {
        double nn = static_cast<double>(n);
        out[n + 1] = x * std::sqrt(2.0 / (nn + 1)) * out[n] - std::sqrt(nn / (nn + 1)) * out[n - 1];
    }
}

double fock_wavefunction(std::size_t n, double x) {
    std::vector<double> psi(n + 1);
    fock_wavefunctions(x, psi);
    return psi[n];
}

double laguerre(std::size_t n, double z) {
    double prev = 1.0;
    if (n == 0) {
        return prev;
    }
    double cur = 1.0 - z;
    for (std::size_t k = 1; k < n; ++k) {
        double kk = static_cast<double>(k);
        double next = ((2 * kk + 1 - z) * cur - kk * prev) / (kk + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

FockBasis::FockBasis(std::size_t n_max) : cutoff(n_max) {
    if (n_max < 1) {
        throw InvalidParameter("Fock cutoff must be at least 1");
    }
}

DensityDiagonal::DensityDiagonal(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
        throw InvalidParameter("density diagonal needs at least one entry");
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        double w = weights_[n];
        if (!std::isfinite(w) || w < 0.0) {
            std::ostringstream msg;
            msg << "rho_" << n << n << " = " << w << " is not a valid probability";
            throw InvalidParameter(msg.str());
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "density diagonal sums to " << sum << ", expected 1";
        throw InvalidParameter(msg.str());
    }
    for (double &w : weights_) {
        w /= sum;
    }
}

DensityDiagonal DensityDiagonal::fock(std::size_t n, std::size_t cutoff) {
    if (n > cutoff) {
        throw InvalidParameter("Fock index above cutoff");
    }
    std::vector<double> w(cutoff + 1, 0.0);
    w[n] = 1.0;
    return DensityDiagonal(std::move(w));
}

DensityDiagonal DensityDiagonal::lossy_single_photon(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw InvalidParameter("efficiency must lie in [0, 1]");
    }
    return DensityDiagonal({1.0 - eta, eta});
}

double DensityDiagonal::quadrature_density(double x) const {
    std::vector<double> psi(weights_.size());
    fock_wavefunctions(x, psi);
    double p = 0.0;
    for (std::size_t n = 0; n < psi.size(); ++n) {
        p += weights_[n] * psi[n] * psi[n];
    }
    return p;
}

MleResult mle_diagonal(std::span<const double> samples, const FockBasis &basis, const MleOptions &options,
                       const MleObserver &observer) {
    const std::size_t n_samples = samples.size();
    const std::size_t dim = basis.dimension();
    if (n_samples == 0) {
        throw InsufficientData("maximum likelihood needs at least one sample");
    }
    MleResult result;
    if (n_samples < 100) {
        result.warnings.push_back("fewer than 100 samples; estimate is unreliable");
    }

    // |psi_n(x_i)|^2, sample-major.
    std::vector<double> table(n_samples * dim);
    for (std::size_t i = 0; i < n_samples; ++i) {
        std::span<double> row(table.data() + i * dim, dim);
        fock_wavefunctions(samples[i], row);
        for (double &v : row) {
            v *= v;
        }
    }

    std::vector<double> rho(dim, 1.0 / static_cast<double>(dim));
    std::vector<double> grad(dim);
    double prev_ll = -std::numeric_limits<double>::infinity();
    const double inv_n = 1.0 / static_cast<double>(n_samples);

    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double ll = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            const double *row = table.data() + i * dim;
            double p = 0.0;
            for (std::size_t n = 0; n < dim; ++n) {
                p += rho[n] * row[n];
            }
            // Far-tail samples can underflow every density.
            p = std::max(p, std::numeric_limits<double>::min());
            ll += std::log(p);
            double inv_p = 1.0 / p;
            for (std::size_t n = 0; n < dim; ++n) {
                grad[n] += row[n] * inv_p;
            }
        }
        ll *= inv_n;

        double sum = 0.0;
        for (std::size_t n = 0; n < dim; ++n) {
            rho[n] *= grad[n] * inv_n;
            sum += rho[n];
        }
        for (double &r : rho) {
            r /= sum;
        }

        double delta = ll - prev_ll;
        if (iter > 1 && delta < -1e-12) {
            ++result.monotonicity_violations;
        }
        result.iterations = iter;
        result.mean_log_likelihood = ll;
        result.final_delta = std::abs(delta);
        if (observer) {
            observer(iter, rho, ll);
        }
        if (iter > 1 && std::abs(delta) < options.tol) {
            result.converged = true;
            break;
        }
        prev_ll = ll;
    }
    if (!result.converged) {
        std::ostringstream msg;
        msg << "EM did not converge in " << options.max_iters << " iterations (last delta " << result.final_delta
            << ")";
        result.warnings.push_back(msg.str());
    }
    result.rho = DensityDiagonal(std::move(rho));
    return result;
}

double wigner(const DensityDiagonal &rho, double x, double p) {
    double r2 = x * x + p * p;
    double sum = 0.0;
    const auto &w = rho.weights();
    for (std::size_t n = 0; n < w.size(); ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sign * w[n] * laguerre(n, 2 * r2);
    }
    return std::exp(-r2) * sum / std::numbers::pi;
}

std::vector<double> wigner_section(const DensityDiagonal &rho, std::span<const double> radii) {
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        out.push_back(wigner(rho, r, 0.0));
    }
    return out;
}

double wigner_origin(const DensityDiagonal &rho) {
    double sum = 0.0;
    const auto &w = rho.weights();
    for (std::size_t n = 0; n < w.size(); ++n) {
        sum += (n % 2 == 0) ? w[n] : -w[n];
    }
    return sum / std::numbers::pi;
}

BootstrapSummary bootstrap(std::span<const double> samples, const Estimator &estimator, std::size_t replicas,
                           std::uint64_t seed) {
    if (samples.empty()) {
        throw InsufficientData("bootstrap needs samples");
    }
    if (replicas < 2) {
        throw InvalidParameter("bootstrap needs at least two replicas");
    }
    BootstrapSummary summary;
    summary.replicas = replicas;
    std::vector<std::vector<double>> outputs;
    outputs.reserve(replicas);
    std::vector<double> resampled(samples.size());
    for (std::size_t r = 0; r < replicas; ++r) {
        Rng rng = make_substream(seed, StreamTag::bootstrap, r);
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        for (double &v : resampled) {
            v = samples[pick(rng)];
        }
        outputs.push_back(estimator(resampled));
        if (outputs.back().size() != outputs.front().size()) {
            throw InvalidParameter("estimator output size changed between replicas");
        }
    }
    const std::size_t dim = outputs.front().size();
    summary.mean.assign(dim, 0.0);
    summary.stddev.assign(dim, 0.0);
    for (const auto &o : outputs) {
        for (std::size_t d = 0; d < dim; ++d) {
            summary.mean[d] += o[d];
        }
    }
    for (double &m : summary.mean) {
        m /= static_cast<double>(replicas);
    }
    for (const auto &o : outputs) {
        for (std::size_t d = 0; d < dim; ++d) {
            double e = o[d] - summary.mean[d];
            summary.stddev[d] += e * e;
        }
    }
    for (double &s : summary.stddev) {
        s = std::sqrt(s / static_cast<double>(replicas - 1));
    }
    return summary;
}

}  // namespace rtquad
