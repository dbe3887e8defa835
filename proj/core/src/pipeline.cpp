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

#include "rtquad/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "rtquad/error.hpp"
#include "rtquad/io.hpp"

namespace rtquad {

using nlohmann::json;

namespace {

std::string join(const std::string &dir, const std::string &name) {
    return (std::filesystem::path(dir) / name).string();
}

json moments(std::span<const double> v) {
    double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {{"count", v.size()}, {"mean", mean}, {"variance", v.size() > 1 ? ss / (n - 1) : 0.0}};
}

std::vector<double> grid_times_ns(const TimeGrid &grid) {
    std::vector<double> t(grid.n_samples);
    for (std::size_t k = 0; k < grid.n_samples; ++k) {
        t[k] = grid.time(k) * 1e9;
    }
    return t;
}

void write_histogram(const std::string &path, const Histogram &h, const DensityDiagonal *model,
                     std::uint64_t fingerprint) {
    std::vector<double> centers, counts, density, fitted;
    const double total = static_cast<double>(h.total());
    for (std::size_t i = 0; i < h.spec.bins; ++i) {
        double c = h.spec.center(i);
        centers.push_back(c);
        counts.push_back(static_cast<double>(h.counts[i]));
        density.push_back(static_cast<double>(h.counts[i]) / (total * h.spec.width()));
        fitted.push_back(model != nullptr ? model->quadrature_density(c) : 0.0);
    }
    if (model != nullptr) {
        write_csv(path, {"x", "count", "density", "mle_density"}, {centers, counts, density, fitted}, fingerprint);
    } else {
        write_csv(path, {"x", "count", "density"}, {centers, counts, density}, fingerprint);
    }
}

void write_joint(const std::string &path, const JointHistogram &h, std::uint64_t fingerprint) {
    std::vector<double> a, b, c;
    for (std::size_t i = 0; i < h.spec.bins; ++i) {
        for (std::size_t j = 0; j < h.spec.bins; ++j) {
            a.push_back(h.spec.center(i));
            b.push_back(h.spec.center(j));
            c.push_back(static_cast<double>(h.counts[i * h.spec.bins + j]));
        }
    }
    write_csv(path, {"postprocessed", "realtime", "count"}, {a, b, c}, fingerprint);
}

void write_time_histogram(const std::string &path, const TimeResolvedHistogram &h, const TimeGrid &grid,
                          std::uint64_t fingerprint) {
    std::vector<double> t, x, c;
    for (std::size_t k = 0; k < h.n_times; ++k) {
        for (std::size_t j = 0; j < h.spec.bins; ++j) {
            t.push_back(grid.time(k) * 1e9);
            x.push_back(h.spec.center(j));
            c.push_back(static_cast<double>(h.counts[k * h.spec.bins + j]));
        }
    }
    write_csv(path, {"time_ns", "x", "count"}, {t, x, c}, fingerprint);
}

json profile_summary(const VarianceProfile &p, const TimeGrid &grid) {
    std::size_t argmax = p.first_valid;
    for (std::size_t k = p.first_valid; k < p.variance.size(); ++k) {
        if (p.variance[k] > p.variance[argmax]) {
            argmax = k;
        }
    }
    return {{"herald_index", grid.herald_index},
            {"variance_at_herald", p.variance[grid.herald_index]},
            {"argmax_index", argmax},
            {"max_variance", p.variance[argmax]},
            {"first_valid_index", p.first_valid}};
}

void write_profile(const std::string &path, const VarianceProfile &p, const TimeGrid &grid,
                   std::uint64_t fingerprint) {
    std::vector<double> valid(p.variance.size());
    for (std::size_t k = 0; k < valid.size(); ++k) {
        valid[k] = k >= p.first_valid ? 1.0 : 0.0;
    }
    write_csv(path, {"time_ns", "variance", "std_error", "valid"}, {grid_times_ns(grid), p.variance, p.std_error, valid},
              fingerprint);
}

struct Chain {
    TemporalMode mode;
    SampledMode sampled;
    PoleCascade cascade;
    DiscretizedFilter discrete;
};

Chain build_chain(const RunConfig &config, const TimeGrid &grid) {
    TemporalMode mode = config.simulation.mode.build();
    SampledMode sampled = sample(mode, grid);
    PoleCascade cascade = build_filter(config.simulation.filter, mode);
    DiscretizedFilter discrete = discretize(cascade, grid.dt);
    return {mode, sampled, cascade, discrete};
}

void warn_fingerprint(const TraceEnsemble &ensemble, const RunConfig &config) {
    if (ensemble.fingerprint() != config.fingerprint()) {
        std::cerr << "warning: ensemble fingerprint " << hex_fingerprint(ensemble.fingerprint())
                  << " differs from the configuration (" << hex_fingerprint(config.fingerprint()) << ")\n";
    }
}

json pca_block(const PcaResult &pca, const Chain &chain) {
    return {{"mode_match", mode_match(pca.mode, chain.sampled)},
            {"eigenvalue", pca.eigenvalue},
            {"iterations", pca.iterations},
            {"converged", pca.converged},
            {"warnings", pca.warnings}};
}

void write_mode_table(const std::string &path, const TimeGrid &grid, const PcaResult &pca, const Chain &chain,
                      std::uint64_t fingerprint) {
    SampledMode weight = weighting_function(chain.cascade, grid);
    write_csv(path, {"time_ns", "pca_estimate", "theory", "filter_weighting"},
              {grid_times_ns(grid), pca.mode.values, chain.sampled.values, weight.values}, fingerprint);
}

}  // namespace

TomographyOutcome run_tomography(std::span<const double> values, Channel channel,
                                 const TomographySettings &settings, std::uint64_t seed) {
    FockBasis basis(settings.cutoff);
    TomographyOutcome out;
    out.channel = channel;
    out.n_samples = values.size();
    out.mle = mle_diagonal(values, basis, settings.mle);
    out.wigner_origin = rtquad::wigner_origin(out.mle.rho);
    for (double r = 0.0; r <= settings.wigner_max_radius + 1e-12; r += settings.wigner_step) {
        out.radii.push_back(r);
    }
    out.section = wigner_section(out.mle.rho, out.radii);
    if (settings.bootstrap >= 2) {
        Estimator estimator = [&](std::span<const double> resampled) {
            MleResult r = mle_diagonal(resampled, basis, settings.mle);
            std::vector<double> v = r.rho.weights();
            v.push_back(rtquad::wigner_origin(r.rho));
            return v;
        };
        BootstrapSummary summary = bootstrap(values, estimator, settings.bootstrap, seed);
        out.rho_err.assign(summary.stddev.begin(), summary.stddev.end() - 1);
        out.wigner_origin_err = summary.stddev.back();
        out.bootstrap_replicas = summary.replicas;
    }
    return out;
}

json to_json(const TomographyOutcome &o) {
    json j = {
        {"channel", to_string(o.channel)},
        {"n_samples", o.n_samples},
        {"rho", o.mle.rho.weights()},
        {"rho_err", o.rho_err},
        {"single_photon", o.mle.rho[1]},
        {"single_photon_err", o.rho_err.size() > 1 ? o.rho_err[1] : 0.0},
        {"wigner_origin", o.wigner_origin},
        {"wigner_origin_err", o.wigner_origin_err},
        {"bootstrap_replicas", o.bootstrap_replicas},
        {"iterations", o.mle.iterations},
        {"converged", o.mle.converged},
        {"final_delta", o.mle.final_delta},
        {"mean_log_likelihood", o.mle.mean_log_likelihood},
        {"warnings", o.mle.warnings},
    };
    return j;
}

void write_tomography_tables(const std::string &stem, const TomographyOutcome &o, std::uint64_t fingerprint) {
    std::vector<double> n, rho, err;
    for (std::size_t k = 0; k < o.mle.rho.weights().size(); ++k) {
        n.push_back(static_cast<double>(k));
        rho.push_back(o.mle.rho[k]);
        err.push_back(k < o.rho_err.size() ? o.rho_err[k] : 0.0);
    }
    write_csv(stem + "_rho.csv", {"n", "rho_nn", "error"}, {n, rho, err}, fingerprint);
    write_csv(stem + "_wigner.csv", {"x", "W"}, {o.radii, o.section}, fingerprint);
}

json cmd_simulate(const RunConfig &config, const std::string &out_path) {
    config.validate();
    TraceEnsemble ensemble = simulate_ensemble(config.simulation);
    write_ensemble(out_path, ensemble);
    return {{"fingerprint", hex_fingerprint(ensemble.fingerprint())},
            {"events", ensemble.size()},
            {"n_samples", ensemble.grid().n_samples},
            {"file", out_path},
            {"truth", truth_sidecar_path(out_path)}};
}

AnalyzeWhat analyze_what_from_string(const std::string &name) {
    if (name == "pca") {
        return AnalyzeWhat::pca;
    }
    if (name == "quads") {
        return AnalyzeWhat::quads;
    }
    if (name == "profile") {
        return AnalyzeWhat::profile;
    }
    if (name == "corr") {
        return AnalyzeWhat::corr;
    }
    throw InvalidParameter("unknown analysis '" + name + "' (expected pca, quads, profile or corr)");
}

json cmd_analyze(AnalyzeWhat what, const std::string &ensemble_path, const RunConfig &config,
                 const std::string &out_dir) {
    config.validate();
    TraceEnsemble ensemble = read_ensemble(ensemble_path);
    warn_fingerprint(ensemble, config);
    Chain chain = build_chain(config, ensemble.grid());
    const std::uint64_t fp = ensemble.fingerprint();
    const BinSpec &bins = config.analysis.histogram;
    json report = {{"fingerprint", hex_fingerprint(fp)}, {"events", ensemble.size()}};

    switch (what) {
        case AnalyzeWhat::pca: {
            PcaResult pca = pca_mode_estimate(ensemble, &chain.sampled, config.analysis.pca);
            report["pca"] = pca_block(pca, chain);
            report["mode"] = mode_record(chain.mode);
            write_mode_table(join(out_dir, "mode.csv"), ensemble.grid(), pca, chain, fp);
            break;
        }
        case AnalyzeWhat::quads: {
            QuadratureSet post = postprocessed_quadratures(ensemble, chain.sampled);
            QuadratureSet rt = realtime_quadratures(ensemble, chain.discrete);
            std::vector<QuadratureSet> sets{post, rt};
            write_quadratures(join(out_dir, "quadratures.csv"), sets);
            write_histogram(join(out_dir, "hist_postprocessed.csv"), histogram(post.values, bins), nullptr, fp);
            write_histogram(join(out_dir, "hist_realtime.csv"), histogram(rt.values, bins), nullptr, fp);
            report["postprocessed"] = moments(post.values);
            report["realtime"] = moments(rt.values);
            break;
        }
        case AnalyzeWhat::profile: {
            VarianceProfile p = variance_profile(ensemble, chain.discrete);
            write_profile(join(out_dir, "variance_profile.csv"), p, ensemble.grid(), fp);
            write_time_histogram(join(out_dir, "time_histogram.csv"),
                                 time_resolved_histogram(ensemble, chain.discrete, bins), ensemble.grid(), fp);
            report["variance_profile"] = profile_summary(p, ensemble.grid());
            break;
        }
        case AnalyzeWhat::corr: {
            QuadratureSet post = postprocessed_quadratures(ensemble, chain.sampled);
            QuadratureSet rt = realtime_quadratures(ensemble, chain.discrete);
            report["correlation"] = pearson_correlation(post, rt);
            write_joint(join(out_dir, "joint_histogram.csv"), joint_histogram(post.values, rt.values, bins), fp);
            break;
        }
    }
    write_json(join(out_dir, "analysis.json"), report);
    return report;
}

json cmd_tomo(const std::string &quadrature_path, Channel channel, const RunConfig &config,
              const std::string &out_path) {
    QuadratureSet set = read_quadratures(quadrature_path, channel);
    if (set.size() == 0) {
        throw InsufficientData(quadrature_path + ": no quadrature values");
    }
    TomographyOutcome outcome = run_tomography(set.values, channel, config.tomography, config.simulation.seed);
    json report = to_json(outcome);
    report["fingerprint"] = hex_fingerprint(set.fingerprint);
    report["settings"] = {{"cutoff", config.tomography.cutoff},
                          {"max_iters", config.tomography.mle.max_iters},
                          {"tol", config.tomography.mle.tol},
                          {"bootstrap", config.tomography.bootstrap}};
    write_json(out_path, report);
    std::filesystem::path stem = std::filesystem::path(out_path);
    stem.replace_extension();
    write_tomography_tables(stem.string(), outcome, set.fingerprint);
    return report;
}

json cmd_reproduce(const RunConfig &config, const std::string &out_dir) {
    config.validate();
    const SimConfig &sim = config.simulation;
    const BinSpec &bins = config.analysis.histogram;
    TraceEnsemble ensemble = simulate_ensemble(sim);
    const std::uint64_t fp = ensemble.fingerprint();
    Chain chain = build_chain(config, sim.grid);

    QuadratureSet post = postprocessed_quadratures(ensemble, chain.sampled);
    QuadratureSet rt = realtime_quadratures(ensemble, chain.discrete);
    std::vector<QuadratureSet> sets{post, rt};
    write_quadratures(join(out_dir, "quadratures.csv"), sets);

    PcaResult pca = pca_mode_estimate(ensemble, &chain.sampled, config.analysis.pca);
    write_mode_table(join(out_dir, "mode.csv"), sim.grid, pca, chain, fp);

    VarianceProfile profile = variance_profile(ensemble, chain.discrete);
    write_profile(join(out_dir, "variance_profile.csv"), profile, sim.grid, fp);
    write_time_histogram(join(out_dir, "time_histogram.csv"), time_resolved_histogram(ensemble, chain.discrete, bins),
                         sim.grid, fp);

    double r = pearson_correlation(post, rt);
    write_joint(join(out_dir, "joint_histogram.csv"), joint_histogram(post.values, rt.values, bins), fp);

    TomographyOutcome tomo_post = run_tomography(post.values, Channel::postprocessed, config.tomography, sim.seed);
    TomographyOutcome tomo_rt = run_tomography(rt.values, Channel::realtime, config.tomography, sim.seed);
    write_tomography_tables(join(out_dir, "tomo_postprocessed"), tomo_post, fp);
    write_tomography_tables(join(out_dir, "tomo_realtime"), tomo_rt, fp);
    write_histogram(join(out_dir, "hist_postprocessed.csv"), histogram(post.values, bins), &tomo_post.mle.rho, fp);
    write_histogram(join(out_dir, "hist_realtime.csv"), histogram(rt.values, bins), &tomo_rt.mle.rho, fp);

    json summary = {
        {"fingerprint", hex_fingerprint(fp)},
        {"config", to_json(config)},
        {"mode", mode_record(chain.mode)},
        {"filter", filter_record(chain.cascade, chain.discrete)},
        {"filter_mode_match", mode_match(weighting_function(chain.cascade, sim.grid), chain.sampled)},
        {"pca", pca_block(pca, chain)},
        {"quadratures", {{"postprocessed", moments(post.values)}, {"realtime", moments(rt.values)}}},
        {"correlation", r},
        {"variance_profile", profile_summary(profile, sim.grid)},
        {"tomography", {{"postprocessed", to_json(tomo_post)}, {"realtime", to_json(tomo_rt)}}},
    };
    write_json(join(out_dir, "summary.json"), summary);
    return summary;
}

json cmd_stream(const RunConfig &config, const std::string &out_dir) {
    config.validate();
    const SimConfig &sim = config.simulation;
    Chain chain = build_chain(config, sim.grid);
    StreamSource stream(sim, config.stream_duration);
    std::vector<double> latched = latch_stream(stream, chain.discrete);

    TraceEnsemble ensemble = simulate_ensemble(sim);
    QuadratureSet per_event = realtime_quadratures(ensemble, chain.discrete);

    json s_stream = moments(latched);
    json s_event = moments(per_event.values);
    double ratio = s_stream["variance"].get<double>() / s_event["variance"].get<double>();

    std::vector<double> idx, times;
    for (std::size_t h : stream.herald_indices()) {
        idx.push_back(static_cast<double>(h));
        times.push_back(static_cast<double>(h) * stream.dt());
    }
    write_csv(join(out_dir, "stream_quadratures.csv"), {"herald_index", "time_s", "realtime"}, {idx, times, latched},
              config.fingerprint());
    json report = {
        {"fingerprint", hex_fingerprint(config.fingerprint())},
        {"duration_s", config.stream_duration},
        {"samples", stream.total_samples()},
        {"heralds", stream.herald_indices().size()},
        {"stream", s_stream},
        {"per_event", s_event},
        {"variance_ratio", ratio},
        {"warnings", stream.warnings()},
    };
    write_json(join(out_dir, "stream.json"), report);
    return report;
}

}  // namespace rtquad
