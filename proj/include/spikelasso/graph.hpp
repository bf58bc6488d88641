#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

namespace spikelasso {

/// Directed graph over n_nodes neurons. Ground truth for simulation and
/// evaluation. Node indices are 0-based everywhere, including on disk.
///
/// Edges are ordered (source, target) pairs; the adjacency convention is
/// row = source, column = target. Self-loops are invalid. An optional
/// per-edge weight multiplier (default 1.0) lets the simulator scale
/// synaptic conductance per edge.
struct DirectedGraph {
    int n_nodes = 0;
    /// Sorted, duplicate-free list of (source, target) pairs.
    std::vector<std::pair<int, int>> edges;
    /// Sparse overrides; any edge not present here has weight 1.0.
    std::map<std::pair<int, int>, double> edge_weights;

    std::size_t n_edges() const { return edges.size(); }
    bool has_edge(int source, int target) const;
    double weight(int source, int target) const;

    /// Throws ParameterError / DataError on any invariant violation
    /// (self-loop, index out of range, duplicate edge, unsorted storage).
    void validate() const;
};

/// Erdos-Renyi style directed graph: each of the n_nodes*(n_nodes-1)
/// ordered non-self pairs is included independently with probability
/// p_connect. Deterministic given the seed.
DirectedGraph generate_random(int n_nodes, double p_connect, std::uint64_t seed);

/// Dense 0/1 adjacency, entry (source, target). Diagonal is all zero.
std::vector<std::vector<int>> to_adjacency(const DirectedGraph& g);

/// Inverse of to_adjacency. Throws DataError if the matrix is not square,
/// not 0/1, or has a nonzero diagonal.
DirectedGraph from_adjacency(const std::vector<std::vector<int>>& adjacency);

/// Number of unordered pairs {i, j} with both (i,j) and (j,i) present.
int count_bidirectional(const DirectedGraph& g);

/// JSON form: {"n_nodes": N, "edges": [[src, tgt], ...]}. Non-default edge
/// weights, when present, are written under an extra "edge_weights" key as
/// [[src, tgt, w], ...]; files without that key read back with all weights 1.
void write_graph_json(const DirectedGraph& g, const std::filesystem::path& path);
DirectedGraph read_graph_json(const std::filesystem::path& path);

/// CSV form: N rows x N columns of 0/1, no header.
void write_adjacency_csv(const DirectedGraph& g, const std::filesystem::path& path);
DirectedGraph read_adjacency_csv(const std::filesystem::path& path);

} // namespace spikelasso
