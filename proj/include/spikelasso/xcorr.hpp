#pragma once

#include <cstdint>
#include <vector>

#include "spikelasso/events.hpp"
#include "spikelasso/graph.hpp"
#include "spikelasso/lasso.hpp"

namespace spikelasso {

/// Cross-correlation peaks over strictly positive lags. The raw
/// coincidence count at lag tau,
///   CC_ij(tau) = sum_m ST_i[m] * ST_j[m + tau] / sqrt(N_i * N_j),
/// is maximized over tau in [1, max_lag]; restricting to positive lags
/// makes i lead j, so a peak is evidence for the directed edge i -> j.
/// The zero-lag bin is excluded to avoid symmetric counting.
struct CorrelationResult {
    int n_neurons = 0;
    int max_lag = 0;
    std::vector<double> peak_value; // row-major source x target, diag 0
    std::vector<int> peak_lag;      // arg max, bins; 0 where flagged
    std::vector<std::uint8_t> flagged; // 1 where either train is empty

    double peak(int i, int j) const {
        return peak_value[static_cast<std::size_t>(i) * n_neurons + j];
    }
    int lag(int i, int j) const {
        return peak_lag[static_cast<std::size_t>(i) * n_neurons + j];
    }
    bool is_flagged(int i, int j) const {
        return flagged[static_cast<std::size_t>(i) * n_neurons + j] != 0;
    }
};

/// Peak normalized cross-correlation per ordered pair. Pairs where either
/// train has no spikes get peak 0 and a flagged status.
/// Throws ParameterError if max_lag is not in [1, n_bins).
CorrelationResult cross_correlate(const BinaryProcessMatrix& spikes, int max_lag);

/// Edge (i, j) iff peak(i, j) > threshold.
DirectedGraph topology_from_threshold(const CorrelationResult& cr, double threshold);

/// Pairs ordered by descending peak value; ties by smaller lag, then by
/// (source, target).
RankedEdgeList rank_edges_from_correlation(const CorrelationResult& cr,
                                           const std::string& method_tag = "xcorr");

} // namespace spikelasso
