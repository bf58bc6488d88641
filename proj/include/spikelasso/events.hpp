#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spikelasso/sim.hpp"

namespace spikelasso {

/// Derivative-based event detector settings. An event marks the onset of
/// a voltage upswing (EPSP-like response signature). A sample qualifies
/// iff every enabled condition holds:
///   (i)   right derivative >= right_deriv_threshold      (positive)
///   (ii)  right - left     >= deriv_jump_threshold       (positive)
///   (iii) left derivative  >= left_deriv_threshold       (negative)
/// Each maximal run of consecutive qualifying samples yields one event at
/// its first sample.
struct EventDetectorParams {
    double right_deriv_threshold = 1.0; // mV/ms
    double deriv_jump_threshold = 1.0;  // mV/ms
    double left_deriv_threshold = -1.0; // mV/ms
    bool use_condition_i = true;
    bool use_condition_ii = true;
    bool use_condition_iii = true;
    /// Number of samples on each side used for the one-sided
    /// least-squares slope estimates.
    int deriv_window = 5;

    void validate() const;
};

struct Occurrence {
    int neuron = 0;
    double time_ms = 0.0;

    friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

enum class ProcessKind { spike, event };

/// Binned 0/1 indicators, bins x neurons. Bin m (0-based) covers the
/// interval (m*delta, (m+1)*delta]; multiple occurrences in one bin
/// collapse to a single 1.
struct BinaryProcessMatrix {
    double delta_ms = 1.0;
    int n_bins = 0;
    int n_neurons = 0;
    ProcessKind kind = ProcessKind::spike;
    std::vector<std::uint8_t> values; // row-major bins x neurons

    std::uint8_t at(int bin, int neuron) const {
        return values[static_cast<std::size_t>(bin) * n_neurons + neuron];
    }
    std::uint8_t& at(int bin, int neuron) {
        return values[static_cast<std::size_t>(bin) * n_neurons + neuron];
    }
    long count_ones() const;
};

/// Spike times per neuron. Passes the simulator's ground-truth spike
/// times through when the trace carries them; otherwise detects upward
/// crossings of threshold_mv with a lockout.
std::vector<Occurrence> detect_spikes(const VoltageTraces& tr,
                                      double threshold_mv = -20.0,
                                      double lockout_ms = 2.0);

/// Derivative-based event onsets, ordered by (neuron, time).
/// Throws ParameterError if the trace has fewer than 2*deriv_window + 1
/// samples.
std::vector<Occurrence> detect_events(const VoltageTraces& tr,
                                      const EventDetectorParams& p);

/// Per-sample qualification mask for one neuron's trace, before run
/// collapse. Exposed for condition ablations and for property checks:
/// enabling more conditions can only clear mask entries.
std::vector<std::uint8_t> qualifying_mask(const VoltageTraces& tr, int neuron,
                                          const EventDetectorParams& p);

/// Bin spike and event occurrences into the two binary processes
/// (x = spikes, y = events). Occurrences at t = 0 land in bin 0;
/// occurrences past the last full bin are dropped.
/// Throws DataError for times outside [0, duration].
std::pair<BinaryProcessMatrix, BinaryProcessMatrix>
bin_processes(const std::vector<Occurrence>& spikes,
              const std::vector<Occurrence>& events, int n_neurons,
              double duration_ms, double delta_ms);

} // namespace spikelasso
