#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spikelasso/graph.hpp"

namespace spikelasso {

// Units used throughout the simulator: time ms, voltage mV, current pA,
// capacitance pF, conductance nS except where a field name says pS.
// With these units pA / pF = mV / ms and nS * mV = pA, so no conversion
// constants appear in the integrator.

/// Leaky integrate-and-fire membrane. This is a documented substitution:
/// the reference protocol uses a Hodgkin-Huxley granule-cell model whose
/// equations are not available here. The LIF surrogate preserves what the
/// downstream pipeline consumes: subthreshold EPSP upswings with
/// well-defined left/right derivatives, spikes, and noise-driven false
/// events.
struct NeuronParams {
    double membrane_capacitance_pf = 12.0;
    double leak_conductance_ns = 0.05;
    double leak_reversal_mv = -70.0;
    double spike_threshold_mv = -40.0;
    double reset_potential_mv = -70.0;
    double refractory_ms = 2.0;
    double bias_current_mean_pa = 2.0;
    double bias_current_std_pa = 0.2;

    void validate() const;
};

/// Two-state kinetic receptor: dr/dt = r1*T(t)*(1-r) - r2*r, where T(t)
/// is a square transmitter pulse after each presynaptic spike. The third
/// kinetic state of the literature scheme is dropped because r6 = 0 for
/// both synapse classes used here; a nonzero r6 is rejected.
struct SynapseParams {
    double gmax_ps = 800.0;
    double r1_per_ms_mm = 5.4;
    double r2_per_ms = 0.84;
    double r6_per_ms_mm = 0.0;
    double transmitter_pulse_amplitude_mm = 1.0;
    double transmitter_pulse_duration_ms = 1.0;
    double reversal_potential_mv = 0.0;

    void validate() const;
};

/// Fast excitatory synapse used on network edges.
SynapseParams ampa_edge_synapse();
/// Slow-decay synapse driven by the per-neuron Poisson background.
SynapseParams noise_synapse();

struct SimConfig {
    double duration_ms = 5000.0;
    double dt_ms = 0.025;
    double noise_rate_hz = 0.2; // per neuron
    std::uint64_t seed = 0;
    int record_stride = 1;
    double synaptic_delay_ms = 1.0; // applies to network edges, not noise
    double spike_peak_mv = 20.0;    // painted into the recorded trace at spike times

    void validate() const;
};

/// Sampled membrane potentials, samples x neurons, plus the simulator's
/// ground-truth spike times when available.
struct VoltageTraces {
    double dt_record_ms = 0.0;
    int n_neurons = 0;
    std::vector<double> values; // row-major, n_samples x n_neurons

    /// Per-neuron sorted spike times (ms). Present when produced by
    /// simulate() or loaded together with a spike file.
    std::optional<std::vector<std::vector<double>>> spike_times;

    int n_samples() const {
        return n_neurons == 0 ? 0 : static_cast<int>(values.size()) / n_neurons;
    }
    double at(int sample, int neuron) const {
        return values[static_cast<std::size_t>(sample) * n_neurons + neuron];
    }
    double last_time_ms() const { return (n_samples() - 1) * dt_record_ms; }
};

/// Advance the two-state receptor fraction r over dt with the transmitter
/// concentration held constant at T_mm. Exact exponential update.
double advance_receptor(double r, double r1_per_ms_mm, double r2_per_ms,
                        double T_mm, double dt_ms);

/// Simulate the network. Deterministic given cfg.seed.
///
/// Each presynaptic spike on edge (j, i) schedules a transmitter pulse on
/// that edge's receptor after cfg.synaptic_delay_ms; the synaptic current
/// onto neuron i is gmax * weight(j,i) * r * (reversal - V_i). The membrane
/// integrates leak, a per-neuron bias current drawn once from
/// Normal(bias_mean, bias_std), the edge synapses, and one noise synapse
/// driven by an independent Poisson train per neuron. Threshold crossings
/// emit a spike at the end of the step, paint spike_peak_mv into the
/// recorded sample, reset the membrane and clamp it for the refractory
/// period.
///
/// Throws NumericError carrying the first offending time and neuron if the
/// membrane potential becomes non-finite.
VoltageTraces simulate(const DirectedGraph& g, const NeuronParams& neuron,
                       const SynapseParams& edge_synapse,
                       const SynapseParams& noise_synapse_params,
                       const SimConfig& cfg);

} // namespace spikelasso
