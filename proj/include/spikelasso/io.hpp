#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spikelasso/eval.hpp"
#include "spikelasso/events.hpp"
#include "spikelasso/lasso.hpp"
#include "spikelasso/sim.hpp"
#include "spikelasso/xcorr.hpp"

namespace spikelasso {

/// Shortest text form of a double that parses back to the same bits.
/// All numeric output goes through this so file round trips are exact.
std::string format_double(double v);

/// Trace file: CSV with header `time,v0,...,v{N-1}`, time in ms,
/// voltages in mV. When the trace carries spike times and a spike path
/// is given, they are written alongside as CSV `neuron,time_ms`.
void write_traces(const VoltageTraces& tr, const std::filesystem::path& traces_csv,
                  const std::filesystem::path& spikes_csv = {});

/// Reads a trace file, attaching spike times from spikes_csv when given.
/// Single-sample files carry no step information; dt_record is set to
/// 1 ms for those. Throws FormatError with the offending line number.
VoltageTraces read_traces(const std::filesystem::path& traces_csv,
                          const std::filesystem::path& spikes_csv = {});

void write_spikes_csv(const std::vector<std::vector<double>>& spike_times,
                      const std::filesystem::path& path);
std::vector<std::vector<double>> read_spikes_csv(const std::filesystem::path& path,
                                                 int n_neurons);

/// Raster file: sparse CSV `neuron,bin_index,kind` with one row per
/// 1-entry, or a dense 0/1 matrix (bins x neurons) when dense = true.
/// Matrix shape and bin width travel in a small JSON sidecar written by
/// write_raster_meta.
void write_raster_csv(const BinaryProcessMatrix& m, const std::filesystem::path& path,
                      bool dense = false);
BinaryProcessMatrix read_raster_csv(const std::filesystem::path& path, double delta_ms,
                                    int n_bins, int n_neurons, ProcessKind kind,
                                    bool dense = false);

void write_raster_meta(const BinaryProcessMatrix& spikes,
                       const std::filesystem::path& path, bool dense);
struct RasterMeta {
    double delta_ms = 1.0;
    int n_bins = 0;
    int n_neurons = 0;
    bool dense = false;
};
RasterMeta read_raster_meta(const std::filesystem::path& path);

/// Ranked edge list: CSV `src,tgt,score`.
void write_ranked_csv(const RankedEdgeList& ranked, const std::filesystem::path& path);
RankedEdgeList read_ranked_csv(const std::filesystem::path& path,
                               const std::string& method_tag);

/// Correlation output: CSV `src,tgt,peak,lag`.
void write_correlation_csv(const CorrelationResult& cr,
                           const std::filesystem::path& path);

/// One JSON object per path point:
/// {"lambda": ..., "intercepts": [...], "betas": [[src, tgt, value], ...]}
/// (nonzero betas only), collected in a top-level array.
void write_path_json(const LambdaPath& path, const std::filesystem::path& file);

/// Path summary: CSV `lambda,n_nonzero,objective`.
void write_path_summary_csv(const LambdaPath& path, const RegressionProblem& problem,
                            const std::filesystem::path& file);

/// Curve output: CSV `k,fraction,tp,fp,tpr,fpr,ppc` over the padded
/// ranking, one row per prefix length k = 1..universe.
void write_curves_csv(const RankedEdgeList& ranked, const DirectedGraph& truth,
                      const std::filesystem::path& path);

} // namespace spikelasso
