#include "spikelasso/xcorr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikelasso/errors.hpp"

namespace spikelasso {

CorrelationResult cross_correlate(const BinaryProcessMatrix& spikes, int max_lag) {
    const int n = spikes.n_neurons;
    const int bins = spikes.n_bins;
    if (max_lag < 1 || max_lag >= bins)
        throw ParameterError("cross_correlate: max_lag must lie in [1, n_bins)");

    // Spike trains as bin-index lists; the sums only visit coincidences.
    std::vector<std::vector<int>> train(n);
    for (int m = 0; m < bins; ++m)
        for (int i = 0; i < n; ++i)
            if (spikes.at(m, i))
                train[i].push_back(m);

    CorrelationResult cr;
    cr.n_neurons = n;
    cr.max_lag = max_lag;
    cr.peak_value.assign(static_cast<std::size_t>(n) * n, 0.0);
    cr.peak_lag.assign(static_cast<std::size_t>(n) * n, 0);
    cr.flagged.assign(static_cast<std::size_t>(n) * n, 0);

    std::vector<long> coincidences(max_lag + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const std::size_t cell = static_cast<std::size_t>(i) * n + j;
            if (train[i].empty() || train[j].empty()) {
                cr.flagged[cell] = 1;
                continue;
            }
            std::fill(coincidences.begin(), coincidences.end(), 0L);
            for (int mi : train[i]) {
                // Count target spikes at mi + tau for tau in [1, max_lag].
                auto lo = std::lower_bound(train[j].begin(), train[j].end(), mi + 1);
                for (auto it = lo; it != train[j].end() && *it <= mi + max_lag; ++it)
                    ++coincidences[*it - mi];
            }
            long best = 0;
            int best_lag = 1;
            for (int tau = 1; tau <= max_lag; ++tau) {
                if (coincidences[tau] > best) {
                    best = coincidences[tau];
                    best_lag = tau;
                }
            }
            const double norm = std::sqrt(static_cast<double>(train[i].size()) *
                                          static_cast<double>(train[j].size()));
            cr.peak_value[cell] = static_cast<double>(best) / norm;
            cr.peak_lag[cell] = best > 0 ? best_lag : 0;
        }
    }
    return cr;
}

DirectedGraph topology_from_threshold(const CorrelationResult& cr, double threshold) {
    if (!(threshold >= 0.0))
        throw ParameterError("topology_from_threshold: threshold must be >= 0");
    DirectedGraph g;
    g.n_nodes = cr.n_neurons;
    for (int i = 0; i < cr.n_neurons; ++i)
        for (int j = 0; j < cr.n_neurons; ++j)
            if (i != j && cr.peak(i, j) > threshold)
                g.edges.emplace_back(i, j);
    return g;
}

RankedEdgeList rank_edges_from_correlation(const CorrelationResult& cr,
                                           const std::string& method_tag) {
    struct Entry {
        int i, j, lag;
        double peak;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < cr.n_neurons; ++i)
        for (int j = 0; j < cr.n_neurons; ++j)
            if (i != j)
                entries.push_back({i, j, cr.lag(i, j), cr.peak(i, j)});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.peak != b.peak)
            return a.peak > b.peak;
        if (a.lag != b.lag)
            return a.lag < b.lag;
        return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
    });
    RankedEdgeList out;
    out.method_tag = method_tag;
    for (const auto& e : entries)
        out.edges.push_back({e.i, e.j, e.peak});
    return out;
}

} // namespace spikelasso
