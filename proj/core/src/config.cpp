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

#include "rtquad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto &p : problems) {
              msg += "\n  " + p;
          }
          return msg;
      }()),
      problems_(std::move(problems)) {
}

namespace {

/// Collects field-level problems instead of stopping at the first one.
class FieldReader {
   public:
    std::vector<std::string> problems;

    bool object(const json &node, const std::string &path) {
        if (!node.is_object()) {
            problems.push_back(path + ": expected an object");
            return false;
        }
        return true;
    }

    void allow_only(const json &node, const std::string &path, std::set<std::string> allowed) {
        for (const auto &[key, value] : node.items()) {
            if (!allowed.contains(key)) {
                problems.push_back((path.empty() ? key : path + "." + key) + ": unknown key");
            }
        }
    }

    template <typename T>
    void optional(const json &node, const std::string &path, const char *key, T &out) {
        if (!node.contains(key)) {
            return;
        }
        try {
            out = node.at(key).get<T>();
        } catch (const json::exception &) {
            std::string field = path.empty() ? std::string(key) : path + "." + key;
            problems.push_back(field + ": wrong type (got " + node.at(key).dump() + ")");
        }
    }

    template <typename Fn>
    void check(const std::string &field, Fn &&fn) {
        try {
            fn();
        } catch (const Error &e) {
            problems.push_back(field + ": " + e.what());
        }
    }
};

void read_mode(FieldReader &r, const json &node, ModeSpec &mode) {
    const std::string path = "simulation.mode";
    if (!r.object(node, path)) {
        return;
    }
    r.allow_only(node, path, {"kind", "gammas", "hwhm_hz", "hwhm_to_rate", "herald_time"});
    std::string kind = to_string(mode.kind);
    r.optional(node, path, "kind", kind);
    r.check(path + ".kind", [&] { mode.kind = mode_kind_from_string(kind); });
    r.optional(node, path, "herald_time", mode.herald_time);
    bool has_gammas = node.contains("gammas");
    bool has_hwhm = node.contains("hwhm_hz");
    if (has_gammas && has_hwhm) {
        r.problems.push_back(path + ": give either gammas or hwhm_hz, not both");
        return;
    }
    if (has_gammas) {
        r.optional(node, path, "gammas", mode.gammas);
    } else if (has_hwhm) {
        std::vector<double> hwhm;
        double factor = kDefaultHwhmToRate;
        r.optional(node, path, "hwhm_hz", hwhm);
        r.optional(node, path, "hwhm_to_rate", factor);
        mode.gammas.clear();
        for (double h : hwhm) {
            mode.gammas.push_back(factor * h);
        }
    } else if (node.contains("hwhm_to_rate")) {
        r.problems.push_back(path + ".hwhm_to_rate: only meaningful together with hwhm_hz");
    }
    r.check(path, [&] { (void)mode.build(); });
}

void read_simulation(FieldReader &r, const json &node, RunConfig &cfg) {
    const std::string path = "simulation";
    if (!r.object(node, path)) {
        return;
    }
    r.allow_only(node, path,
                 {"mode", "grid", "efficiency", "source_diagonal", "n_events", "herald_rate", "stream_duration"});
    SimConfig &sim = cfg.simulation;
    if (node.contains("mode")) {
        read_mode(r, node.at("mode"), sim.mode);
    }
    if (node.contains("grid")) {
        const json &g = node.at("grid");
        if (r.object(g, path + ".grid")) {
            r.allow_only(g, path + ".grid", {"dt", "n_samples", "herald_index"});
            r.optional(g, path + ".grid", "dt", sim.grid.dt);
            r.optional(g, path + ".grid", "n_samples", sim.grid.n_samples);
            sim.grid.herald_index = sim.grid.n_samples / 2;
            r.optional(g, path + ".grid", "herald_index", sim.grid.herald_index);
            r.check(path + ".grid", [&] { sim.grid.validate(); });
        }
    }
    r.optional(node, path, "efficiency", sim.efficiency);
    if (!(sim.efficiency >= 0.0 && sim.efficiency <= 1.0)) {
        r.problems.push_back(path + ".efficiency: must lie in [0, 1]");
    }
    if (node.contains("source_diagonal") && !node.at("source_diagonal").is_null()) {
        std::vector<double> w;
        r.optional(node, path, "source_diagonal", w);
        sim.source_diagonal = w;
        r.check(path + ".source_diagonal", [&] { (void)DensityDiagonal(w); });
    }
    r.optional(node, path, "n_events", sim.n_events);
    r.optional(node, path, "herald_rate", sim.herald_rate);
    if (!(sim.herald_rate >= 0.0)) {
        r.problems.push_back(path + ".herald_rate: must be nonnegative");
    }
    r.optional(node, path, "stream_duration", cfg.stream_duration);
    if (!(cfg.stream_duration > 0.0)) {
        r.problems.push_back(path + ".stream_duration: must be positive");
    }
}

void read_filter(FieldReader &r, const json &node, FilterSpec &spec) {
    const std::string path = "filter";
    if (!r.object(node, path)) {
        return;
    }
    r.allow_only(node, path, {"type", "rates", "rate_perturbation"});
    std::string type = to_string(spec.type);
    r.optional(node, path, "type", type);
    r.check(path + ".type", [&] { spec.type = filter_type_from_string(type); });
    r.optional(node, path, "rates", spec.rates);
    r.optional(node, path, "rate_perturbation", spec.rate_perturbation);
    if (!(std::abs(spec.rate_perturbation) < 1.0)) {
        r.problems.push_back(path + ".rate_perturbation: must lie in (-1, 1)");
    }
}

void read_analysis(FieldReader &r, const json &node, AnalysisSettings &a) {
    const std::string path = "analysis";
    if (!r.object(node, path)) {
        return;
    }
    r.allow_only(node, path, {"histogram", "pca_tol", "pca_max_iters"});
    if (node.contains("histogram")) {
        const json &h = node.at("histogram");
        if (r.object(h, path + ".histogram")) {
            r.allow_only(h, path + ".histogram", {"bins", "lo", "hi"});
            r.optional(h, path + ".histogram", "bins", a.histogram.bins);
            r.optional(h, path + ".histogram", "lo", a.histogram.lo);
            r.optional(h, path + ".histogram", "hi", a.histogram.hi);
            r.check(path + ".histogram", [&] { a.histogram.validate(); });
        }
    }
    r.optional(node, path, "pca_tol", a.pca.tol);
    r.optional(node, path, "pca_max_iters", a.pca.max_iters);
    if (!(a.pca.tol > 0.0)) {
        r.problems.push_back(path + ".pca_tol: must be positive");
    }
}

void read_tomography(FieldReader &r, const json &node, TomographySettings &t) {
    const std::string path = "tomography";
    if (!r.object(node, path)) {
        return;
    }
    r.allow_only(node, path, {"cutoff", "max_iters", "tol", "bootstrap", "wigner_max_radius", "wigner_step"});
    r.optional(node, path, "cutoff", t.cutoff);
    r.optional(node, path, "max_iters", t.mle.max_iters);
    r.optional(node, path, "tol", t.mle.tol);
    r.optional(node, path, "bootstrap", t.bootstrap);
    r.optional(node, path, "wigner_max_radius", t.wigner_max_radius);
    r.optional(node, path, "wigner_step", t.wigner_step);
    if (t.cutoff < 1) {
        r.problems.push_back(path + ".cutoff: must be at least 1");
    }
    if (!(t.mle.tol > 0.0)) {
        r.problems.push_back(path + ".tol: must be positive");
    }
    if (t.bootstrap == 1) {
        r.problems.push_back(path + ".bootstrap: use 0 (off) or at least 2 replicas");
    }
    if (!(t.wigner_step > 0.0) || !(t.wigner_max_radius >= 0.0)) {
        r.problems.push_back(path + ".wigner_step/wigner_max_radius: invalid section range");
    }
}

}  // namespace

void RunConfig::validate() const {
    std::vector<std::string> problems;
    try {
        simulation.validate();
        TemporalMode mode = simulation.mode.build();
        PoleCascade cascade = build_filter(simulation.filter, mode);
        (void)discretize(cascade, simulation.grid.dt);
        analysis.histogram.validate();
        (void)FockBasis(tomography.cutoff);
    } catch (const Error &e) {
        problems.push_back(e.what());
    }
    if (!problems.empty()) {
        throw ConfigError(problems);
    }
}

std::uint64_t RunConfig::fingerprint() const {
    return simulation.fingerprint();
}

RunConfig preset(const std::string &name) {
    if (name == "reference") {
        return RunConfig{};
    }
    throw ConfigError({"unknown preset '" + name + "'"});
}

std::vector<std::string> preset_names() {
    return {"reference"};
}

RunConfig parse_config(const json &doc) {
    FieldReader r;
    RunConfig cfg;
    if (!doc.is_object()) {
        throw ConfigError({"configuration root must be an object"});
    }
    r.allow_only(doc, "", {"preset", "seed", "output_dir", "simulation", "filter", "analysis", "tomography"});
    // A preset supplies every section; otherwise all four must be present.
    for (const char *section : {"simulation", "filter", "analysis", "tomography"}) {
        if (!doc.contains("preset") && !doc.contains(section)) {
            r.problems.push_back(std::string(section) + ": missing section");
        }
    }
    if (doc.contains("preset")) {
        std::string name;
        r.optional(doc, "", "preset", name);
        r.check("preset", [&] { cfg = preset(name); });
    }
    r.optional(doc, "", "seed", cfg.simulation.seed);
    r.optional(doc, "", "output_dir", cfg.output_dir);
    if (doc.contains("simulation")) {
        read_simulation(r, doc.at("simulation"), cfg);
    }
    if (doc.contains("filter")) {
        read_filter(r, doc.at("filter"), cfg.simulation.filter);
    }
    if (doc.contains("analysis")) {
        read_analysis(r, doc.at("analysis"), cfg.analysis);
    }
    if (doc.contains("tomography")) {
        read_tomography(r, doc.at("tomography"), cfg.tomography);
    }
    if (r.problems.empty()) {
        try {
            cfg.validate();
        } catch (const ConfigError &e) {
            r.problems.insert(r.problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!r.problems.empty()) {
        throw ConfigError(r.problems);
    }
    return cfg;
}

RunConfig parse_config_text(const std::string &text) {
    json doc;
    bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
        } catch (const json::parse_error &e) {
            throw ConfigError({std::string("not valid JSON: ") + e.what()});
        }
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot open config file '" + path + "'"});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

json to_json(const RunConfig &c) {
    const SimConfig &s = c.simulation;
    json sim = {
        {"mode", {{"kind", to_string(s.mode.kind)}, {"gammas", s.mode.gammas}, {"herald_time", s.mode.herald_time}}},
        {"grid", {{"dt", s.grid.dt}, {"n_samples", s.grid.n_samples}, {"herald_index", s.grid.herald_index}}},
        {"efficiency", s.efficiency},
        {"n_events", s.n_events},
        {"herald_rate", s.herald_rate},
        {"stream_duration", c.stream_duration},
    };
    if (s.source_diagonal) {
        sim["source_diagonal"] = *s.source_diagonal;
    }
    return {
        {"seed", s.seed},
        {"output_dir", c.output_dir},
        {"simulation", sim},
        {"filter",
         {{"type", to_string(s.filter.type)},
          {"rates", s.filter.rates},
          {"rate_perturbation", s.filter.rate_perturbation}}},
        {"analysis",
         {{"histogram", {{"bins", c.analysis.histogram.bins}, {"lo", c.analysis.histogram.lo},
                         {"hi", c.analysis.histogram.hi}}},
          {"pca_tol", c.analysis.pca.tol},
          {"pca_max_iters", c.analysis.pca.max_iters}}},
        {"tomography",
         {{"cutoff", c.tomography.cutoff},
          {"max_iters", c.tomography.mle.max_iters},
          {"tol", c.tomography.mle.tol},
          {"bootstrap", c.tomography.bootstrap},
          {"wigner_max_radius", c.tomography.wigner_max_radius},
          {"wigner_step", c.tomography.wigner_step}}},
    };
}

}  // namespace rtquad
