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

#include "rtquad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

std::string to_string(Channel channel) {
    return channel == Channel::realtime ? "realtime" : "postprocessed";
}

Channel channel_from_string(const std::string &name) {
    if (name == "realtime") {
        return Channel::realtime;
    }
    if (name == "postprocessed") {
        return Channel::postprocessed;
    }
    throw InvalidParameter("unknown channel '" + name + "'");
}

double postprocess_quadrature(std::span<const double> trace, const SampledMode &mode) {
    if (trace.size() != mode.values.size()) {
        throw IncompatibleGrid("trace and mode have different lengths");
    }
    return std::inner_product(trace.begin(), trace.end(), mode.values.begin(), 0.0);
}

QuadratureSet postprocessed_quadratures(const TraceEnsemble &ensemble, const SampledMode &mode) {
    if (!(ensemble.grid() == mode.grid)) {
        throw IncompatibleGrid("mode is not sampled on the ensemble grid");
    }
    QuadratureSet out;
    out.channel = Channel::postprocessed;
    out.fingerprint = ensemble.fingerprint();
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        out.event_ids.push_back(i);
        out.values.push_back(postprocess_quadrature(ensemble.trace(i), mode));
    }
    return out;
}

void for_each_filtered(const TraceEnsemble &ensemble, const DiscretizedFilter &filter,
                       const std::function<void(std::size_t, std::span<const double>)> &fn) {
    if (std::abs(filter.dt - ensemble.grid().dt) > 1e-12 * ensemble.grid().dt) {
        throw IncompatibleGrid("filter was discretized for a different dt");
    }
    std::vector<double> filtered(ensemble.grid().n_samples);
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        FilterState state(filter);
        filter_block(state, filter, ensemble.trace(i), filtered);
        fn(i, filtered);
    }
}

QuadratureSet realtime_quadratures(const TraceEnsemble &ensemble, const DiscretizedFilter &filter) {
    QuadratureSet out;
    out.channel = Channel::realtime;
    out.fingerprint = ensemble.fingerprint();
    const std::size_t herald = ensemble.grid().herald_index;
    for_each_filtered(ensemble, filter, [&](std::size_t i, std::span<const double> y) {
        out.event_ids.push_back(i);
        out.values.push_back(realtime_quadrature(y, herald));
    });
    return out;
}

PcaResult pca_mode_estimate(const TraceEnsemble &ensemble, const SampledMode *reference, const PcaOptions &options) {
    const std::size_t n_events = ensemble.size();
    const std::size_t n = ensemble.grid().n_samples;
    if (n_events < 2) {
        throw InsufficientData("PCA needs at least two traces");
    }
    if (reference != nullptr && !(reference->grid == ensemble.grid())) {
        throw IncompatibleGrid("reference mode is not sampled on the ensemble grid");
    }
    PcaResult result;
    if (n_events < 10 * n) {
        std::ostringstream msg;
        msg << n_events << " traces for " << n << " samples; the eigenvector estimate will be noisy";
        result.warnings.push_back(msg.str());
    }

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (reference != nullptr) {
        v = reference->values;
    }
    std::vector<double> u(n);
    const double inv_n = 1.0 / static_cast<double>(n_events);
    auto apply = [&](const std::vector<double> &in, std::vector<double> &out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < n_events; ++i) {
            auto row = ensemble.trace(i);
            double w = std::inner_product(row.begin(), row.end(), in.begin(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                out[k] += w * row[k];
            }
        }
        for (double &x : out) {
            x *= inv_n;
        }
    };

    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        apply(v, u);
        double norm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
        if (!(norm > 0.0)) {
            throw InsufficientData("autocorrelation is zero; traces carry no signal");
        }
        double sign = std::inner_product(u.begin(), u.end(), v.begin(), 0.0) < 0.0 ? -1.0 : 1.0;
        double diff = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] *= sign / norm;
            double d = u[k] - v[k];
            diff += d * d;
        }
        v.swap(u);
        result.iterations = iter;
        if (std::sqrt(diff) < options.tol) {
            result.converged = true;
            break;
        }
    }
    if (!result.converged) {
        result.warnings.push_back("power iteration did not reach tolerance");
    }

    double orient = 0.0;
    if (reference != nullptr) {
        orient = std::inner_product(v.begin(), v.end(), reference->values.begin(), 0.0);
    } else {
        auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        orient = *it;
    }
    if (orient < 0.0) {
        for (double &x : v) {
            x = -x;
        }
    }
    apply(v, u);
    result.eigenvalue = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    result.mode = make_sampled(ensemble.grid(), std::move(v));
    return result;
}

std::vector<double> autocorrelation(const TraceEnsemble &ensemble) {
    const std::size_t n = ensemble.grid().n_samples;
    if (ensemble.size() == 0) {
        throw InsufficientData("empty ensemble");
    }
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        auto row = ensemble.trace(i);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j; k < n; ++k) {
                c[j * n + k] += row[j] * row[k];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(ensemble.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            c[j * n + k] *= inv;
            c[k * n + j] = c[j * n + k];
        }
    }
    return c;
}

VarianceProfile variance_profile(const TraceEnsemble &ensemble, const DiscretizedFilter &filter) {
    const std::size_t n = ensemble.grid().n_samples;
    const std::size_t n_events = ensemble.size();
    if (n_events < 2) {
        throw InsufficientData("variance profile needs at least two traces");
    }
    std::vector<double> m1(n, 0.0), m2(n, 0.0), m3(n, 0.0), m4(n, 0.0);
    for_each_filtered(ensemble, filter, [&](std::size_t, std::span<const double> y) {
        for (std::size_t k = 0; k < n; ++k) {
            double a = y[k];
            double a2 = a * a;
            m1[k] += a;
            m2[k] += a2;
            m3[k] += a2 * a;
            m4[k] += a2 * a2;
        }
    });
    VarianceProfile p;
    p.n_events = n_events;
    p.first_valid = std::min(filter.warmup_samples(), n);
    p.variance.resize(n);
    p.std_error.resize(n);
    const double count = static_cast<double>(n_events);
    for (std::size_t k = 0; k < n; ++k) {
        double mean = m1[k] / count;
        double e2 = m2[k] / count;
        double e3 = m3[k] / count;
        double e4 = m4[k] / count;
        double var = e2 - mean * mean;
        double mu4 = e4 - 4 * mean * e3 + 6 * mean * mean * e2 - 3 * mean * mean * mean * mean;
        p.variance[k] = std::max(0.0, var * count / (count - 1));
        p.std_error[k] = std::sqrt(std::max(0.0, mu4 - var * var) / count);
    }
    return p;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidParameter("correlation inputs differ in length");
    }
    if (a.size() < 2) {
        throw InsufficientData("correlation needs at least two pairs");
    }
    const double count = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / count;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / count;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma;
        double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        throw InvalidParameter("correlation undefined for zero-variance input");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pearson_correlation(const QuadratureSet &a, const QuadratureSet &b) {
    if (a.event_ids != b.event_ids) {
        throw InvalidParameter("quadrature sets are not paired by event id");
    }
    return pearson_correlation(a.values, b.values);
}

void BinSpec::validate() const {
    if (bins == 0 || !(hi > lo)) {
        throw InvalidParameter("histogram needs at least one bin and hi > lo");
    }
}

std::size_t BinSpec::index(double x) const noexcept {
    if (!(x >= lo) || !(x < hi)) {
        return bins;
    }
    auto i = static_cast<std::size_t>((x - lo) / width());
    return std::min(i, bins - 1);
}

std::uint64_t Histogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) + underflow + overflow;
}

Histogram histogram(std::span<const double> values, const BinSpec &spec) {
    spec.validate();
    if (values.empty()) {
        throw InsufficientData("histogram of empty input");
    }
    Histogram h;
    h.spec = spec;
    h.counts.assign(spec.bins, 0);
    for (double x : values) {
        std::size_t i = spec.index(x);
        if (i < spec.bins) {
            ++h.counts[i];
        } else if (x < spec.lo) {
            ++h.underflow;
        } else {
            ++h.overflow;
        }
    }
    return h;
}

JointHistogram joint_histogram(std::span<const double> a, std::span<const double> b, const BinSpec &spec) {
    spec.validate();
    if (a.empty()) {
        throw InsufficientData("histogram of empty input");
    }
    if (a.size() != b.size()) {
        throw InvalidParameter("joint histogram inputs differ in length");
    }
    JointHistogram h;
    h.spec = spec;
    h.counts.assign(spec.bins * spec.bins, 0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        std::size_t i = spec.index(a[k]);
        std::size_t j = spec.index(b[k]);
        if (i < spec.bins && j < spec.bins) {
            ++h.counts[i * spec.bins + j];
        }
    }
    return h;
}

TimeResolvedHistogram time_resolved_histogram(const TraceEnsemble &ensemble, const DiscretizedFilter &filter,
                                              const BinSpec &spec) {
    spec.validate();
    if (ensemble.size() == 0) {
        throw InsufficientData("histogram of empty ensemble");
    }
    TimeResolvedHistogram h;
    h.spec = spec;
    h.n_times = ensemble.grid().n_samples;
    h.counts.assign(h.n_times * spec.bins, 0);
    for_each_filtered(ensemble, filter, [&](std::size_t, std::span<const double> y) {
        for (std::size_t k = 0; k < y.size(); ++k) {
            std::size_t j = spec.index(y[k]);
            if (j < spec.bins) {
                ++h.counts[k * spec.bins + j];
            }
        }
    });
    return h;
}

std::vector<double> latch_stream(StreamSource &stream, const DiscretizedFilter &filter, std::size_t block_size) {
    if (std::abs(filter.dt - stream.dt()) > 1e-12 * stream.dt()) {
        throw IncompatibleGrid("filter was discretized for a different dt");
    }
    if (block_size == 0) {
        throw InvalidParameter("block size must be positive");
    }
    const auto &heralds = stream.herald_indices();
    std::vector<double> latched;
    latched.reserve(heralds.size());
    std::vector<double> in(block_size), out(block_size);
    FilterState state(filter);
    std::size_t next = 0;
    while (true) {
        std::size_t start = stream.position();
        std::size_t got = stream.read(in);
        if (got == 0) {
            break;
        }
        filter_block(state, filter, std::span<const double>(in).first(got), std::span<double>(out).first(got));
        while (next < heralds.size() && heralds[next] < start + got) {
            latched.push_back(out[heralds[next] - start]);
            ++next;
        }
    }
    return latched;
}

}  // namespace rtquad
