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

#include "rtquad/filters.hpp"
#include "rtquad/simulator.hpp"
#include "rtquad/temporal_modes.hpp"

namespace rtquad {

enum class Channel { realtime, postprocessed };

std::string to_string(Channel channel);
Channel channel_from_string(const std::string &name);

/// One scalar quadrature per herald event.
struct QuadratureSet {
    Channel channel = Channel::postprocessed;
    std::vector<std::uint64_t> event_ids;
    std::vector<double> values;
    std::uint64_t fingerprint = 0;

    std::size_t size() const noexcept {
        return values.size();
    }
};

/// sum_k f_k x_k.
double postprocess_quadrature(std::span<const double> trace, const SampledMode &mode);

QuadratureSet postprocessed_quadratures(const TraceEnsemble &ensemble, const SampledMode &mode);

/// Filters every trace from a zero state and reads the output at the herald.
QuadratureSet realtime_quadratures(const TraceEnsemble &ensemble, const DiscretizedFilter &filter);

/// Calls fn(event, filtered trace) for every event.
void for_each_filtered(const TraceEnsemble &ensemble, const DiscretizedFilter &filter,
                       const std::function<void(std::size_t, std::span<const double>)> &fn);

struct PcaOptions {
    double tol = 1e-10;
    std::size_t max_iters = 5000;
};

struct PcaResult {
    SampledMode mode;
    /// Rayleigh quotient of the estimate; 1/2 + eta for an ideal ensemble.
    double eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Leading eigenvector of C_jk = (1/N) sum_i x_j^(i) x_k^(i) on raw traces,
/// by power iteration. C is never formed: each step applies X^T X / N.
/// The iteration starts from `reference` when given (uniform otherwise) and
/// the sign is fixed so <estimate, reference> > 0, or, without a reference,
/// so the largest-magnitude entry is positive.
PcaResult pca_mode_estimate(const TraceEnsemble &ensemble, const SampledMode *reference = nullptr,
                            const PcaOptions &options = {});

/// Dense autocorrelation matrix, row-major n_samples x n_samples.
std::vector<double> autocorrelation(const TraceEnsemble &ensemble);

/// Per-sample variance of filtered traces across the ensemble.
struct VarianceProfile {
    std::vector<double> variance;
    /// Standard error of each variance estimate, from the sample fourth
    /// central moment.
    std::vector<double> std_error;
    /// Samples before this index are inside the filter warm-up.
    std::size_t first_valid = 0;
    std::size_t n_events = 0;
};

VarianceProfile variance_profile(const TraceEnsemble &ensemble, const DiscretizedFilter &filter);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Pearson r of two channels; throws unless they pair the same event ids.
double pearson_correlation(const QuadratureSet &a, const QuadratureSet &b);

struct BinSpec {
    std::size_t bins = 81;
    double lo = -5.0;
    double hi = 5.0;

    void validate() const;
    double width() const noexcept {
        return (hi - lo) / static_cast<double>(bins);
    }
    double center(std::size_t i) const noexcept {
        return lo + (static_cast<double>(i) + 0.5) * width();
    }
    /// Bin of x, or bins when x falls outside [lo, hi).
    std::size_t index(double x) const noexcept;
};

struct Histogram {
    BinSpec spec;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    std::uint64_t total() const noexcept;
};

Histogram histogram(std::span<const double> values, const BinSpec &spec = {});

/// Row-major counts[i * bins + j] for a in bin i and b in bin j. Pairs with
/// either value out of range are dropped.
struct JointHistogram {
    BinSpec spec;
    std::vector<std::uint64_t> counts;
};

JointHistogram joint_histogram(std::span<const double> a, std::span<const double> b, const BinSpec &spec = {});

/// Histogram of the filtered signal at every sample time:
/// counts[k * bins + j].
struct TimeResolvedHistogram {
    BinSpec spec;
    std::size_t n_times = 0;
    std::vector<std::uint64_t> counts;
};

TimeResolvedHistogram time_resolved_histogram(const TraceEnsemble &ensemble, const DiscretizedFilter &filter,
                                              const BinSpec &spec = {});

/// Runs a stream through a causal filter block by block and latches the
/// output at every herald index.
std::vector<double> latch_stream(StreamSource &stream, const DiscretizedFilter &filter,
                                 std::size_t block_size = std::size_t{1} << 16);

}  // namespace rtquad
