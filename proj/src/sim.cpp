#include "spikelasso/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikelasso/errors.hpp"
#include "spikelasso/rng.hpp"

namespace spikelasso {

void NeuronParams::validate() const {
    if (!(membrane_capacitance_pf > 0.0))
        throw ParameterError("neuron: capacitance must be > 0");
    if (!(leak_conductance_ns > 0.0))
        throw ParameterError("neuron: leak conductance must be > 0");
    if (!(refractory_ms >= 0.0))
        throw ParameterError("neuron: refractory period must be >= 0");
    if (!(spike_threshold_mv > reset_potential_mv))
        throw ParameterError("neuron: spike threshold must exceed reset potential");
    if (!(bias_current_std_pa >= 0.0))
        throw ParameterError("neuron: bias current std must be >= 0");
}

void SynapseParams::validate() const {
    if (!(gmax_ps > 0.0))
        throw ParameterError("synapse: gmax must be > 0");
    if (!(r1_per_ms_mm >= 0.0) || !(r2_per_ms >= 0.0))
        throw ParameterError("synapse: r1 and r2 must be >= 0");
    if (r6_per_ms_mm != 0.0)
        throw ParameterError("synapse: nonzero r6 is not supported by the two-state scheme");
    if (!(transmitter_pulse_duration_ms > 0.0))
        throw ParameterError("synapse: transmitter pulse duration must be > 0");
    if (!(transmitter_pulse_amplitude_mm > 0.0))
        throw ParameterError("synapse: transmitter pulse amplitude must be > 0");
}

SynapseParams ampa_edge_synapse() {
    SynapseParams p;
    p.gmax_ps = 800.0;
    p.r1_per_ms_mm = 5.4;
    p.r2_per_ms = 0.84;
    return p;
}

SynapseParams noise_synapse() {
    SynapseParams p;
    p.gmax_ps = 500.0;
    p.r1_per_ms_mm = 5.4;
    p.r2_per_ms = 0.1;
    return p;
}

void SimConfig::validate() const {
    if (!(dt_ms > 0.0))
        throw ParameterError("sim: dt must be > 0");
    if (!(duration_ms >= dt_ms))
        throw ParameterError("sim: duration must be >= dt");
    if (!(noise_rate_hz >= 0.0))
        throw ParameterError("sim: noise rate must be >= 0");
    if (record_stride < 1)
        throw ParameterError("sim: record_stride must be >= 1");
    if (!(synaptic_delay_ms >= 0.0))
        throw ParameterError("sim: synaptic delay must be >= 0");
}

double advance_receptor(double r, double r1_per_ms_mm, double r2_per_ms,
                        double T_mm, double dt_ms) {
    const double bind = r1_per_ms_mm * T_mm;
    const double rate = bind + r2_per_ms;
    if (rate <= 0.0)
        return r;
    const double r_inf = bind / rate;
    return r_inf + (r - r_inf) * std::exp(-rate * dt_ms);
}

namespace {

// Receptor state plus the pulse window bookkeeping for one synapse.
struct SynapseState {
    double r = 0.0;
    double g_ns = 0.0;            // gmax * edge weight
    long pulse_until_step = -1;   // exclusive
    std::vector<long> scheduled;  // pulse start steps, ascending
    std::size_t next_scheduled = 0;

    bool pulse_active(long step, long pulse_steps) {
        while (next_scheduled < scheduled.size() && scheduled[next_scheduled] <= step) {
            pulse_until_step = std::max(pulse_until_step,
                                        scheduled[next_scheduled] + pulse_steps);
            ++next_scheduled;
        }
        return step < pulse_until_step;
    }
};

// Precomputed exponential factors for one synapse class at fixed dt.
struct KineticStep {
    double r_inf_on = 0.0;
    double decay_on = 1.0;
    double decay_off = 1.0;

    KineticStep() = default;
    KineticStep(const SynapseParams& p, double dt_ms) {
        const double bind = p.r1_per_ms_mm * p.transmitter_pulse_amplitude_mm;
        const double rate_on = bind + p.r2_per_ms;
        if (rate_on > 0.0) {
            r_inf_on = bind / rate_on;
            decay_on = std::exp(-rate_on * dt_ms);
        }
        decay_off = std::exp(-p.r2_per_ms * dt_ms);
    }

    double advance(double r, bool on) const {
        return on ? r_inf_on + (r - r_inf_on) * decay_on : r * decay_off;
    }
};

} // namespace

VoltageTraces simulate(const DirectedGraph& g, const NeuronParams& neuron,
                       const SynapseParams& edge_synapse,
                       const SynapseParams& noise_synapse_params,
                       const SimConfig& cfg) {
    g.validate();
    neuron.validate();
    edge_synapse.validate();
    noise_synapse_params.validate();
    cfg.validate();

    const int n = g.n_nodes;
    const double dt = cfg.dt_ms;
    const long n_steps = static_cast<long>(std::floor(cfg.duration_ms / dt + 1e-9));
    const double dt_record = dt * cfg.record_stride;
    const long n_rows =
        static_cast<long>(std::floor(cfg.duration_ms / dt_record + 1e-9)) + 1;

    const long delay_steps = std::lround(cfg.synaptic_delay_ms / dt);
    const long edge_pulse_steps =
        std::lround(edge_synapse.transmitter_pulse_duration_ms / dt);
    const long noise_pulse_steps =
        std::lround(noise_synapse_params.transmitter_pulse_duration_ms / dt);
    if (edge_pulse_steps < 1 || noise_pulse_steps < 1)
        throw ParameterError("sim: transmitter pulse duration shorter than dt");
    const long refractory_steps =
        static_cast<long>(std::ceil(neuron.refractory_ms / dt - 1e-9));

    const KineticStep edge_kin(edge_synapse, dt);
    const KineticStep noise_kin(noise_synapse_params, dt);
    const double edge_gmax_ns = edge_synapse.gmax_ps * 1e-3;
    const double noise_g_ns = noise_synapse_params.gmax_ps * 1e-3;

    // Per-neuron incoming edge synapses, stored target-major.
    std::vector<std::vector<SynapseState>> in_synapses(n);
    std::vector<std::vector<int>> in_sources(n);
    // Out-edge lookup: for spike delivery, (target, synapse index).
    std::vector<std::vector<std::pair<int, std::size_t>>> out_edges(n);
    for (const auto& [s, t] : g.edges) {
        SynapseState st;
        st.g_ns = edge_gmax_ns * g.weight(s, t);
        out_edges[s].emplace_back(t, in_synapses[t].size());
        in_synapses[t].push_back(st);
        in_sources[t].push_back(s);
    }

    // Per-neuron bias currents, then noise event trains, both from streams
    // derived from the master seed so either can be regenerated in isolation.
    std::vector<double> bias(n);
    {
        Rng rng = Rng::for_stream(cfg.seed, 1);
        for (int i = 0; i < n; ++i)
            bias[i] = rng.normal(neuron.bias_current_mean_pa, neuron.bias_current_std_pa);
    }
    std::vector<SynapseState> noise_syn(n);
    const double noise_rate_per_ms = cfg.noise_rate_hz * 1e-3;
    for (int i = 0; i < n; ++i) {
        noise_syn[i].g_ns = noise_g_ns;
        if (noise_rate_per_ms > 0.0) {
            Rng rng = Rng::for_stream(cfg.seed, 1000 + static_cast<std::uint64_t>(i));
            double t = rng.exponential(noise_rate_per_ms);
            while (t < cfg.duration_ms) {
                noise_syn[i].scheduled.push_back(std::lround(t / dt));
                t += rng.exponential(noise_rate_per_ms);
            }
        }
    }

    VoltageTraces tr;
    tr.dt_record_ms = dt_record;
    tr.n_neurons = n;
    tr.values.assign(static_cast<std::size_t>(n_rows) * n, 0.0);
    tr.spike_times.emplace(n);

    std::vector<double> v(n, neuron.leak_reversal_mv);
    std::vector<long> refractory_until(n, 0);
    const double inv_c = 1.0 / neuron.membrane_capacitance_pf;

    // Row 0 is the initial state.
    for (int i = 0; i < n; ++i)
        tr.values[i] = v[i];

    for (long step = 0; step < n_steps; ++step) {
        const long next = step + 1;
        const double t_next = next * dt;
        const bool record_next = (next % cfg.record_stride == 0) &&
                                 (next / cfg.record_stride < n_rows);
        const long row = next / cfg.record_stride;

        for (int i = 0; i < n; ++i) {
            // Synaptic currents use the receptor state at the start of the
            // step; receptors advance afterwards.
            double i_syn = 0.0;
            for (auto& syn : in_synapses[i])
                i_syn += syn.g_ns * syn.r * (edge_synapse.reversal_potential_mv - v[i]);
            i_syn += noise_syn[i].g_ns * noise_syn[i].r *
                     (noise_synapse_params.reversal_potential_mv - v[i]);

            double recorded = v[i];
            if (refractory_until[i] > step) {
                v[i] = neuron.reset_potential_mv;
                recorded = v[i];
            } else {
                const double i_total =
                    neuron.leak_conductance_ns * (neuron.leak_reversal_mv - v[i]) +
                    bias[i] + i_syn;
                v[i] += dt * i_total * inv_c;
                recorded = v[i];
                if (!std::isfinite(v[i]))
                    throw NumericError("sim: non-finite membrane potential at t=" +
                                       std::to_string(t_next) + " ms, neuron " +
                                       std::to_string(i));
                if (v[i] >= neuron.spike_threshold_mv) {
                    (*tr.spike_times)[i].push_back(t_next);
                    recorded = cfg.spike_peak_mv;
                    v[i] = neuron.reset_potential_mv;
                    refractory_until[i] = next + refractory_steps;
                    for (const auto& [target, idx] : out_edges[i])
                        in_synapses[target][idx].scheduled.push_back(next + delay_steps);
                }
            }

            if (record_next)
                tr.values[static_cast<std::size_t>(row) * n + i] = recorded;

            // Advance receptor states to the end of the step.
            for (auto& syn : in_synapses[i])
                syn.r = edge_kin.advance(syn.r, syn.pulse_active(step, edge_pulse_steps));
            noise_syn[i].r = noise_kin.advance(
                noise_syn[i].r, noise_syn[i].pulse_active(step, noise_pulse_steps));
        }
    }

    return tr;
}

} // namespace spikelasso
