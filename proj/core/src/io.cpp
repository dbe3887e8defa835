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

#include "rtquad/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtquad/error.hpp"

namespace rtquad {

using nlohmann::json;

namespace {

void put_u32(std::vector<unsigned char> &buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
}

void put_u64(std::vector<unsigned char> &buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
}

void put_f64(std::vector<unsigned char> &buf, double v) {
    put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(const unsigned char *p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

std::uint32_t get_u32(const unsigned char *p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string &cell, const std::string &where) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) {
            throw std::invalid_argument(cell);
        }
        return v;
    } catch (const std::exception &) {
        throw FormatError(where + ": '" + cell + "' is not a number");
    }
}

std::ofstream open_out(const std::string &path, std::ios::openmode mode = std::ios::out) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, mode);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    return out;
}

}  // namespace

void write_ensemble(const std::string &path, const TraceEnsemble &ensemble) {
    const TimeGrid &g = ensemble.grid();
    std::vector<unsigned char> header;
    header.reserve(kEnsembleHeaderBytes);
    for (char c : std::string("QHT1")) {
        header.push_back(static_cast<unsigned char>(c));
    }
    put_u32(header, kEnsembleFormatVersion);
    put_f64(header, g.dt);
    put_u64(header, g.n_samples);
    put_u64(header, g.herald_index);
    put_u64(header, ensemble.size());
    put_u64(header, ensemble.fingerprint());

    auto out = open_out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(header.data()), static_cast<std::streamsize>(header.size()));
    std::vector<unsigned char> chunk;
    auto data = ensemble.data();
    constexpr std::size_t kBatch = 1 << 16;
    for (std::size_t start = 0; start < data.size(); start += kBatch) {
        chunk.clear();
        std::size_t end = std::min(data.size(), start + kBatch);
        for (std::size_t i = start; i < end; ++i) {
            put_f64(chunk, data[i]);
        }
        out.write(reinterpret_cast<const char *>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
    }
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
    if (!ensemble.truth().empty()) {
        write_truth(truth_sidecar_path(path), ensemble.truth());
    }
}

TraceEnsemble read_ensemble(const std::string &path, bool with_truth) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open ensemble file '" + path + "'");
    }
    std::array<unsigned char, kEnsembleHeaderBytes> h{};
    in.read(reinterpret_cast<char *>(h.data()), h.size());
    if (in.gcount() != static_cast<std::streamsize>(h.size())) {
        throw FormatError(path + ": truncated header");
    }
    if (std::memcmp(h.data(), "QHT1", 4) != 0) {
        throw FormatError(path + ": not a QHT1 ensemble file");
    }
    std::uint32_t version = get_u32(h.data() + 4);
    if (version != kEnsembleFormatVersion) {
        throw FormatError(path + ": unsupported QHT1 version " + std::to_string(version));
    }
    TimeGrid grid;
    grid.dt = std::bit_cast<double>(get_u64(h.data() + 8));
    grid.n_samples = get_u64(h.data() + 16);
    grid.herald_index = get_u64(h.data() + 24);
    std::uint64_t n_events = get_u64(h.data() + 32);
    std::uint64_t fingerprint = get_u64(h.data() + 40);
    try {
        grid.validate();
    } catch (const Error &e) {
        throw FormatError(path + ": bad grid in header: " + e.what());
    }

    auto file_size = std::filesystem::file_size(path);
    if (n_events > (file_size - kEnsembleHeaderBytes) / 8 / grid.n_samples ||
        file_size != kEnsembleHeaderBytes + 8 * n_events * grid.n_samples) {
        throw FormatError(path + ": size does not match header");
    }

    TraceEnsemble ensemble(grid, n_events, fingerprint);
    auto data = ensemble.data();
    std::vector<unsigned char> chunk;
    constexpr std::size_t kBatch = 1 << 16;
    for (std::size_t start = 0; start < data.size(); start += kBatch) {
        std::size_t count = std::min(kBatch, data.size() - start);
        chunk.resize(8 * count);
        in.read(reinterpret_cast<char *>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
        if (in.gcount() != static_cast<std::streamsize>(chunk.size())) {
            throw FormatError(path + ": truncated sample data");
        }
        for (std::size_t i = 0; i < count; ++i) {
            data[start + i] = std::bit_cast<double>(get_u64(chunk.data() + 8 * i));
        }
    }
    if (with_truth && std::filesystem::exists(truth_sidecar_path(path))) {
        ensemble.truth() = read_truth(truth_sidecar_path(path));
        if (ensemble.truth().size() != n_events) {
            throw FormatError(path + ": truth sidecar has the wrong number of events");
        }
    }
    return ensemble;
}

std::string truth_sidecar_path(const std::string &ensemble_path) {
    return ensemble_path + ".truth.csv";
}

void write_truth(const std::string &path, std::span<const TruthRecord> truth) {
    auto out = open_out(path);
    out << "event_id,photon_number,mode_quadrature\n";
    for (const auto &t : truth) {
        out << t.event_id << ',' << t.photon_number << ',' << format_double(t.mode_quadrature) << '\n';
    }
}

std::vector<TruthRecord> read_truth(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open truth file '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    std::vector<TruthRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != 3) {
            throw FormatError(path + ": expected 3 columns");
        }
        TruthRecord t;
        t.event_id = static_cast<std::uint64_t>(parse_double(cells[0], path));
        t.photon_number = static_cast<std::size_t>(parse_double(cells[1], path));
        t.mode_quadrature = parse_double(cells[2], path);
        out.push_back(t);
    }
    return out;
}

void write_quadratures(const std::string &path, std::span<const QuadratureSet> sets) {
    if (sets.empty()) {
        throw InvalidParameter("no quadrature sets to write");
    }
    for (const auto &s : sets) {
        if (s.event_ids != sets.front().event_ids) {
            throw InvalidParameter("quadrature sets are not paired by event id");
        }
    }
    auto out = open_out(path);
    out << "# fingerprint " << hex_fingerprint(sets.front().fingerprint) << '\n';
    out << "event_id";
    for (const auto &s : sets) {
        out << ',' << to_string(s.channel);
    }
    out << '\n';
    for (std::size_t i = 0; i < sets.front().size(); ++i) {
        out << sets.front().event_ids[i];
        for (const auto &s : sets) {
            out << ',' << format_double(s.values[i]);
        }
        out << '\n';
    }
}

QuadratureSet read_quadratures(const std::string &path, Channel channel) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open quadrature file '" + path + "'");
    }
    QuadratureSet set;
    set.channel = channel;
    std::string line;
    while (true) {
        if (!std::getline(in, line)) {
            throw FormatError(path + ": no header line");
        }
        if (line.rfind("# fingerprint ", 0) == 0) {
            set.fingerprint = std::stoull(line.substr(14), nullptr, 16);
        }
        if (!line.empty() && line[0] != '#') {
            break;
        }
    }
    auto header = split_csv(line);
    std::size_t id_col = header.size();
    std::size_t value_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "event_id") {
            id_col = c;
        } else if (header[c] == to_string(channel)) {
            value_col = c;
        }
    }
    std::size_t value_columns = header.size() - (id_col < header.size() ? 1 : 0);
    if (value_col == header.size()) {
        if (value_columns != 1) {
            throw FormatError(path + ": no column named '" + to_string(channel) + "'");
        }
        value_col = (id_col == 0 && header.size() > 1) ? 1 : 0;
    }
    std::uint64_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r" || line[0] == '#') {
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw FormatError(path + ": row " + std::to_string(row + 2) + " has the wrong number of columns");
        }
        set.values.push_back(parse_double(cells[value_col], path));
        set.event_ids.push_back(id_col < header.size()
                                    ? static_cast<std::uint64_t>(parse_double(cells[id_col], path))
                                    : row);
        ++row;
    }
    return set;
}

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &columns, std::optional<std::uint64_t> fingerprint) {
    if (header.size() != columns.size()) {
        throw InvalidParameter("CSV header and column count differ");
    }
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto &c : columns) {
        if (c.size() != rows) {
            throw InvalidParameter("CSV columns differ in length");
        }
    }
    auto out = open_out(path);
    if (fingerprint) {
        out << "# fingerprint " << hex_fingerprint(*fingerprint) << '\n';
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << format_double(columns[c][r]);
        }
        out << '\n';
    }
}

void write_json(const std::string &path, const json &doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

json mode_record(const TemporalMode &mode) {
    return {
        {"kind", to_string(mode.kind())},
        {"gammas", mode.rates()},
        {"coefficients", mode.coefficients()},
        {"t0", mode.herald_time()},
        {"norm", mode.norm_constant()},
    };
}

TemporalMode mode_from_record(const json &record) {
    try {
        ModeSpec spec;
        spec.kind = mode_kind_from_string(record.at("kind").get<std::string>());
        spec.gammas = record.at("gammas").get<std::vector<double>>();
        spec.herald_time = record.value("t0", 0.0);
        return spec.build();
    } catch (const json::exception &e) {
        throw FormatError(std::string("bad mode record: ") + e.what());
    }
}

json filter_record(const PoleCascade &cascade, const DiscretizedFilter &discrete) {
    return {
        {"gammas", cascade.gammas()},
        {"stage_rates", cascade.stage_rates()},
        {"coefficients", cascade.coefficients()},
        {"overall_gain", cascade.overall_gain()},
        {"dt", discrete.dt},
        {"decay", discrete.decay},
        {"weights", discrete.weights},
        {"input_gain", discrete.input_gain},
    };
}

std::string hex_fingerprint(std::uint64_t fingerprint) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
    return buf;
}

}  // namespace rtquad
