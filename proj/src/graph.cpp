#include "spikelasso/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spikelasso/errors.hpp"
#include "spikelasso/rng.hpp"

namespace spikelasso {

bool DirectedGraph::has_edge(int source, int target) const {
    return std::binary_search(edges.begin(), edges.end(),
                              std::make_pair(source, target));
}

double DirectedGraph::weight(int source, int target) const {
    auto it = edge_weights.find({source, target});
    return it == edge_weights.end() ? 1.0 : it->second;
}

void DirectedGraph::validate() const {
    if (n_nodes < 0)
        throw ParameterError("graph: n_nodes must be nonnegative");
    for (const auto& [s, t] : edges) {
        if (s == t)
            throw DataError("graph: self-loop (" + std::to_string(s) + "," +
                            std::to_string(t) + ") is not allowed");
        if (s < 0 || s >= n_nodes || t < 0 || t >= n_nodes)
            throw DataError("graph: edge (" + std::to_string(s) + "," +
                            std::to_string(t) + ") out of range for n_nodes=" +
                            std::to_string(n_nodes));
    }
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw DataError("graph: edge list must be sorted");
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw DataError("graph: duplicate edge");
    for (const auto& [edge, w] : edge_weights) {
        (void)w;
        if (!std::binary_search(edges.begin(), edges.end(), edge))
            throw DataError("graph: weight for missing edge (" +
                            std::to_string(edge.first) + "," +
                            std::to_string(edge.second) + ")");
    }
}

DirectedGraph generate_random(int n_nodes, double p_connect, std::uint64_t seed) {
    if (n_nodes < 2)
        throw ParameterError("generate_random: n_nodes must be >= 2");
    if (!(p_connect >= 0.0 && p_connect <= 1.0))
        throw ParameterError("generate_random: p_connect must lie in [0, 1]");

    Rng rng(seed);
    DirectedGraph g;
    g.n_nodes = n_nodes;
    for (int s = 0; s < n_nodes; ++s) {
        for (int t = 0; t < n_nodes; ++t) {
            if (s == t)
                continue;
            if (rng.bernoulli(p_connect))
                g.edges.emplace_back(s, t);
        }
    }
    return g;
}

std::vector<std::vector<int>> to_adjacency(const DirectedGraph& g) {
    g.validate();
    std::vector<std::vector<int>> a(g.n_nodes, std::vector<int>(g.n_nodes, 0));
    for (const auto& [s, t] : g.edges)
        a[s][t] = 1;
    return a;
}

DirectedGraph from_adjacency(const std::vector<std::vector<int>>& adjacency) {
    DirectedGraph g;
    g.n_nodes = static_cast<int>(adjacency.size());
    for (int s = 0; s < g.n_nodes; ++s) {
        if (static_cast<int>(adjacency[s].size()) != g.n_nodes)
            throw DataError("from_adjacency: matrix is not square");
        for (int t = 0; t < g.n_nodes; ++t) {
            int v = adjacency[s][t];
            if (v != 0 && v != 1)
                throw DataError("from_adjacency: entries must be 0 or 1");
            if (v == 1 && s == t)
                throw DataError("from_adjacency: nonzero diagonal");
            if (v == 1)
                g.edges.emplace_back(s, t);
        }
    }
    return g;
}

int count_bidirectional(const DirectedGraph& g) {
    g.validate();
    int count = 0;
    for (const auto& [s, t] : g.edges) {
        if (s < t && g.has_edge(t, s))
            ++count;
    }
    return count;
}

void write_graph_json(const DirectedGraph& g, const std::filesystem::path& path) {
    g.validate();
    nlohmann::json j;
    j["n_nodes"] = g.n_nodes;
    auto& e = j["edges"] = nlohmann::json::array();
    for (const auto& [s, t] : g.edges)
        e.push_back({s, t});
    bool any_nondefault = false;
    for (const auto& [edge, w] : g.edge_weights) {
        (void)edge;
        if (w != 1.0)
            any_nondefault = true;
    }
    if (any_nondefault) {
        auto& ws = j["edge_weights"] = nlohmann::json::array();
        for (const auto& [edge, w] : g.edge_weights)
            ws.push_back({edge.first, edge.second, w});
    }
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

DirectedGraph read_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string(), static_cast<long>(e.byte), e.what());
    }
    DirectedGraph g;
    try {
        g.n_nodes = j.at("n_nodes").get<int>();
        for (const auto& e : j.at("edges"))
            g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        if (j.contains("edge_weights")) {
            for (const auto& e : j["edge_weights"])
                g.edge_weights[{e.at(0).get<int>(), e.at(1).get<int>()}] =
                    e.at(2).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string(), 0, e.what());
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.validate();
    return g;
}

void write_adjacency_csv(const DirectedGraph& g, const std::filesystem::path& path) {
    auto a = to_adjacency(g);
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    for (const auto& row : a) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out << ',';
            out << row[c];
        }
        out << '\n';
    }
}

DirectedGraph read_adjacency_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<std::vector<int>> a;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell != "0" && cell != "1")
                throw FormatError(path.string(), lineno,
                                  "expected 0 or 1, got '" + cell + "'");
            row.push_back(cell == "1" ? 1 : 0);
        }
        a.push_back(std::move(row));
    }
    try {
        return from_adjacency(a);
    } catch (const DataError& e) {
        throw FormatError(path.string(), lineno, e.what());
    }
}

} // namespace spikelasso
