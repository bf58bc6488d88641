#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "spikelasso/events.hpp"
#include "spikelasso/lasso.hpp"
#include "spikelasso/sim.hpp"

namespace spikelasso {

/// Everything one pipeline run needs, with the library defaults filled
/// in. A JSON config document overrides fields selectively; unknown keys
/// are rejected so typos do not silently fall back to defaults.
struct PipelineConfig {
    std::uint64_t seed = 12345;
    int threads = 1;

    struct Graph {
        int n_nodes = 20;
        double p_connect = 0.3;
    } graph;

    NeuronParams neuron;
    SynapseParams edge_synapse = ampa_edge_synapse();
    SynapseParams noise_synapse_params = noise_synapse();
    SimConfig sim; // sim.seed is derived from the master seed, see below

    EventDetectorParams events;
    double delta_ms = 1.0;
    double spike_threshold_mv = -20.0; // trace-based spike detection fallback
    double spike_lockout_ms = 2.0;
    std::string method_tag = "lasso";

    struct Lasso {
        int n_lambdas = 50;
        double lambda_min_ratio = 1e-3;
        double tol_kkt = 1e-4;
        double tol_step = 1e-7;
        long max_iter = 100000;
        bool shared_intercept = false;
        WeightRule weight_rule = WeightRule::paper_balance;
        TopologyRule topology_rule = TopologyRule::positive;
    } lasso;

    struct Xcorr {
        int max_lag = 10;
    } xcorr;

    bool dense_rasters = false;

    /// Stage seeds fan out from the master seed by fixed offsets so a
    /// stage can be re-run in isolation with stable randomness.
    std::uint64_t graph_seed() const { return seed + 1; }
    std::uint64_t sim_seed() const { return seed + 2; }

    SolverOptions solver_options() const;

    /// Validates every sub-config against its module's invariants.
    void validate() const;

    std::string to_json_string() const;
};

/// Defaults overridden by the JSON document at `path`.
PipelineConfig load_config(const std::filesystem::path& path);

/// Defaults overridden by a JSON document given as text (used by both
/// load_config and tests).
PipelineConfig parse_config(const std::string& json_text,
                            const std::string& origin = "<config>");

} // namespace spikelasso
