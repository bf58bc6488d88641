#include "spikelasso/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "spikelasso/errors.hpp"

namespace spikelasso {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw NumericError("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return in;
}

double parse_double(const std::string& cell, const std::filesystem::path& path,
                    long line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw FormatError(path.string(), line, "bad number '" + cell + "'");
    return v;
}

long parse_long(const std::string& cell, const std::filesystem::path& path,
                long line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw FormatError(path.string(), line, "bad integer '" + cell + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

} // namespace

void write_traces(const VoltageTraces& tr, const std::filesystem::path& traces_csv,
                  const std::filesystem::path& spikes_csv) {
    auto out = open_out(traces_csv);
    out << "time";
    for (int i = 0; i < tr.n_neurons; ++i)
        out << ",v" << i;
    out << '\n';
    std::string row;
    for (int k = 0; k < tr.n_samples(); ++k) {
        row.clear();
        row += format_double(k * tr.dt_record_ms);
        for (int i = 0; i < tr.n_neurons; ++i) {
            row += ',';
            row += format_double(tr.at(k, i));
        }
        row += '\n';
        out << row;
    }
    if (!spikes_csv.empty() && tr.spike_times)
        write_spikes_csv(*tr.spike_times, spikes_csv);
}

VoltageTraces read_traces(const std::filesystem::path& traces_csv,
                          const std::filesystem::path& spikes_csv) {
    auto in = open_in(traces_csv);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line))
        throw FormatError(traces_csv.string(), 1, "missing header");
    ++lineno;
    auto header = split_csv(line);
    if (header.empty() || header[0] != "time")
        throw FormatError(traces_csv.string(), 1, "header must start with 'time'");
    const int n_neurons = static_cast<int>(header.size()) - 1;
    if (n_neurons < 1)
        throw FormatError(traces_csv.string(), 1, "no voltage columns");

    VoltageTraces tr;
    tr.n_neurons = n_neurons;
    std::vector<double> times;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != n_neurons + 1)
            throw FormatError(traces_csv.string(), lineno,
                              "expected " + std::to_string(n_neurons + 1) +
                                  " columns, got " + std::to_string(cells.size()));
        times.push_back(parse_double(cells[0], traces_csv, lineno));
        for (int i = 0; i < n_neurons; ++i)
            tr.values.push_back(parse_double(cells[i + 1], traces_csv, lineno));
    }
    if (times.empty())
        throw FormatError(traces_csv.string(), lineno, "no samples");
    if (times.size() >= 2) {
        tr.dt_record_ms = times[1] - times[0];
        if (!(tr.dt_record_ms > 0.0))
            throw FormatError(traces_csv.string(), 3, "time column must increase");
    } else {
        tr.dt_record_ms = 1.0; // single sample: no step information
    }
    if (!spikes_csv.empty())
        tr.spike_times = read_spikes_csv(spikes_csv, n_neurons);
    return tr;
}

void write_spikes_csv(const std::vector<std::vector<double>>& spike_times,
                      const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "neuron,time_ms\n";
    for (std::size_t i = 0; i < spike_times.size(); ++i)
        for (double t : spike_times[i])
            out << i << ',' << format_double(t) << '\n';
}

std::vector<std::vector<double>> read_spikes_csv(const std::filesystem::path& path,
                                                 int n_neurons) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line) || line != "neuron,time_ms")
        throw FormatError(path.string(), 1, "expected header 'neuron,time_ms'");
    ++lineno;
    std::vector<std::vector<double>> out(n_neurons);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() != 2)
            throw FormatError(path.string(), lineno, "expected 2 columns");
        const long neuron = parse_long(cells[0], path, lineno);
        if (neuron < 0 || neuron >= n_neurons)
            throw FormatError(path.string(), lineno, "neuron index out of range");
        out[neuron].push_back(parse_double(cells[1], path, lineno));
    }
    return out;
}

namespace {

const char* kind_name(ProcessKind kind) {
    return kind == ProcessKind::spike ? "spike" : "event";
}

} // namespace

void write_raster_csv(const BinaryProcessMatrix& m, const std::filesystem::path& path,
                      bool dense) {
    auto out = open_out(path);
    if (dense) {
        for (int b = 0; b < m.n_bins; ++b) {
            for (int i = 0; i < m.n_neurons; ++i) {
                if (i)
                    out << ',';
                out << static_cast<int>(m.at(b, i));
            }
            out << '\n';
        }
        return;
    }
    out << "neuron,bin_index,kind\n";
    for (int b = 0; b < m.n_bins; ++b)
        for (int i = 0; i < m.n_neurons; ++i)
            if (m.at(b, i))
                out << i << ',' << b << ',' << kind_name(m.kind) << '\n';
}

BinaryProcessMatrix read_raster_csv(const std::filesystem::path& path, double delta_ms,
                                    int n_bins, int n_neurons, ProcessKind kind,
                                    bool dense) {
    BinaryProcessMatrix m;
    m.delta_ms = delta_ms;
    m.n_bins = n_bins;
    m.n_neurons = n_neurons;
    m.kind = kind;
    m.values.assign(static_cast<std::size_t>(n_bins) * n_neurons, 0);

    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    if (dense) {
        int b = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty())
                continue;
            if (b >= n_bins)
                throw FormatError(path.string(), lineno, "more rows than bins");
            auto cells = split_csv(line);
            if (static_cast<int>(cells.size()) != n_neurons)
                throw FormatError(path.string(), lineno, "wrong column count");
            for (int i = 0; i < n_neurons; ++i) {
                const long v = parse_long(cells[i], path, lineno);
                if (v != 0 && v != 1)
                    throw FormatError(path.string(), lineno, "entries must be 0/1");
                m.at(b, i) = static_cast<std::uint8_t>(v);
            }
            ++b;
        }
        if (b != n_bins)
            throw FormatError(path.string(), lineno, "fewer rows than bins");
        return m;
    }

    if (!std::getline(in, line) || line != "neuron,bin_index,kind")
        throw FormatError(path.string(), 1, "expected header 'neuron,bin_index,kind'");
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() != 3)
            throw FormatError(path.string(), lineno, "expected 3 columns");
        const long neuron = parse_long(cells[0], path, lineno);
        const long bin = parse_long(cells[1], path, lineno);
        if (neuron < 0 || neuron >= n_neurons || bin < 0 || bin >= n_bins)
            throw FormatError(path.string(), lineno, "index out of range");
        if (cells[2] != kind_name(kind))
            throw FormatError(path.string(), lineno,
                              "expected kind '" + std::string(kind_name(kind)) + "'");
        m.at(static_cast<int>(bin), static_cast<int>(neuron)) = 1;
    }
    return m;
}

void write_raster_meta(const BinaryProcessMatrix& spikes,
                       const std::filesystem::path& path, bool dense) {
    nlohmann::json j;
    j["delta_ms"] = spikes.delta_ms;
    j["n_bins"] = spikes.n_bins;
    j["n_neurons"] = spikes.n_neurons;
    j["dense"] = dense;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

RasterMeta read_raster_meta(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
        RasterMeta meta;
        meta.delta_ms = j.at("delta_ms").get<double>();
        meta.n_bins = j.at("n_bins").get<int>();
        meta.n_neurons = j.at("n_neurons").get<int>();
        meta.dense = j.at("dense").get<bool>();
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string(), 0, e.what());
    }
}

void write_ranked_csv(const RankedEdgeList& ranked, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "src,tgt,score\n";
    for (const auto& e : ranked.edges)
        out << e.source << ',' << e.target << ',' << format_double(e.score) << '\n';
}

RankedEdgeList read_ranked_csv(const std::filesystem::path& path,
                               const std::string& method_tag) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line))
        throw FormatError(path.string(), 1, "missing header");
    ++lineno;
    auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "src" || header[1] != "tgt")
        throw FormatError(path.string(), 1, "expected header starting 'src,tgt'");

    RankedEdgeList out;
    out.method_tag = method_tag;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split_csv(line);
        if (cells.size() < 3)
            throw FormatError(path.string(), lineno, "expected at least 3 columns");
        RankedEdge e;
        e.source = static_cast<int>(parse_long(cells[0], path, lineno));
        e.target = static_cast<int>(parse_long(cells[1], path, lineno));
        e.score = parse_double(cells[2], path, lineno);
        out.edges.push_back(e);
    }
    return out;
}

void write_correlation_csv(const CorrelationResult& cr,
                           const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "src,tgt,peak,lag\n";
    for (int i = 0; i < cr.n_neurons; ++i)
        for (int j = 0; j < cr.n_neurons; ++j)
            if (i != j)
                out << i << ',' << j << ',' << format_double(cr.peak(i, j)) << ','
                    << cr.lag(i, j) << '\n';
}

void write_path_json(const LambdaPath& path, const std::filesystem::path& file) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t k = 0; k < path.fits.size(); ++k) {
        const auto& fit = path.fits[k];
        nlohmann::json j;
        j["lambda"] = fit.lambda;
        j["intercepts"] = fit.intercepts;
        auto& betas = j["betas"] = nlohmann::json::array();
        for (int s = 0; s < fit.n_neurons; ++s)
            for (int t = 0; t < fit.n_neurons; ++t)
                if (s != t && fit.beta(s, t) != 0.0)
                    betas.push_back({s, t, fit.beta(s, t)});
        arr.push_back(std::move(j));
    }
    auto out = open_out(file);
    out << arr.dump(2) << "\n";
}

void write_path_summary_csv(const LambdaPath& path, const RegressionProblem& problem,
                            const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "lambda,n_nonzero,objective\n";
    for (const auto& fit : path.fits) {
        long nnz = 0;
        for (int s = 0; s < fit.n_neurons; ++s)
            for (int t = 0; t < fit.n_neurons; ++t)
                if (s != t && fit.beta(s, t) != 0.0)
                    ++nnz;
        out << format_double(fit.lambda) << ',' << nnz << ','
            << format_double(penalized_objective(problem, fit)) << '\n';
    }
}

void write_curves_csv(const RankedEdgeList& ranked, const DirectedGraph& truth,
                      const std::filesystem::path& path) {
    truth.validate();
    RankedEdgeList full = pad_to_universe(ranked, truth.n_nodes);
    const long universe = static_cast<long>(truth.n_nodes) * (truth.n_nodes - 1);
    const long positives = static_cast<long>(truth.n_edges());
    const long negatives = universe - positives;

    auto out = open_out(path);
    out << "k,fraction,tp,fp,tpr,fpr,ppc\n";
    long tp = 0, fp = 0;
    for (long r = 0; r < universe; ++r) {
        const auto& e = full.edges[r];
        if (truth.has_edge(e.source, e.target))
            ++tp;
        else
            ++fp;
        const long k = r + 1;
        const double tpr =
            positives > 0 ? static_cast<double>(tp) / positives : std::nan("");
        const double fpr =
            negatives > 0 ? static_cast<double>(fp) / negatives : std::nan("");
        out << k << ',' << format_double(static_cast<double>(k) / universe) << ','
            << tp << ',' << fp << ',' << format_double(tpr) << ','
            << format_double(fpr) << ','
            << format_double(static_cast<double>(tp - fp) / k) << '\n';
    }
}

} // namespace spikelasso
