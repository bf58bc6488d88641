#include "spikelasso/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spikelasso/errors.hpp"

namespace spikelasso {

namespace {

using nlohmann::json;

// Pulls known keys out of `obj`, erroring on anything unrecognized.
class Section {
public:
    Section(const json& obj, std::string name) : name_(std::move(name)) {
        if (!obj.is_object())
            throw ParameterError("config: section '" + name_ + "' must be an object");
        obj_ = &obj;
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions())
            return;
        const std::string prefix = name_.empty() ? "" : name_ + ".";
        for (auto it = obj_->begin(); it != obj_->end(); ++it) {
            if (!used_.count(it.key()))
                throw ParameterError("config: unknown key '" + prefix + it.key() +
                                     "'");
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        used_.insert(key);
        if (obj_->contains(key)) {
            try {
                out = obj_->at(key).get<T>();
            } catch (const json::exception& e) {
                throw ParameterError("config: bad value for '" + name_ + "." + key +
                                     "': " + e.what());
            }
        }
    }

    bool has(const char* key) {
        used_.insert(key);
        return obj_->contains(key);
    }

    const json& at(const char* key) {
        used_.insert(key);
        return obj_->at(key);
    }

private:
    const json* obj_;
    std::string name_;
    std::set<std::string> used_;
};

void parse_synapse(const json& j, const std::string& name, SynapseParams& p) {
    Section s(j, name);
    s.get("gmax_ps", p.gmax_ps);
    s.get("r1_per_ms_mm", p.r1_per_ms_mm);
    s.get("r2_per_ms", p.r2_per_ms);
    s.get("r6_per_ms_mm", p.r6_per_ms_mm);
    s.get("pulse_amplitude_mm", p.transmitter_pulse_amplitude_mm);
    s.get("pulse_duration_ms", p.transmitter_pulse_duration_ms);
    s.get("reversal_mv", p.reversal_potential_mv);
}

} // namespace

SolverOptions PipelineConfig::solver_options() const {
    SolverOptions o;
    o.tol_kkt = lasso.tol_kkt;
    o.tol_step = lasso.tol_step;
    o.max_iter = lasso.max_iter;
    o.shared_intercept = lasso.shared_intercept;
    o.threads = threads;
    return o;
}

void PipelineConfig::validate() const {
    if (graph.n_nodes < 2)
        throw ParameterError("config: graph.n_nodes must be >= 2");
    if (!(graph.p_connect >= 0.0 && graph.p_connect <= 1.0))
        throw ParameterError("config: graph.p_connect must lie in [0, 1]");
    neuron.validate();
    edge_synapse.validate();
    noise_synapse_params.validate();
    sim.validate();
    events.validate();
    if (!(delta_ms > 0.0))
        throw ParameterError("config: delta_ms must be > 0");
    if (lasso.n_lambdas < 2)
        throw ParameterError("config: lasso.n_lambdas must be >= 2");
    if (!(lasso.lambda_min_ratio > 0.0 && lasso.lambda_min_ratio < 1.0))
        throw ParameterError("config: lasso.lambda_min_ratio must lie in (0, 1)");
    if (lasso.max_iter < 1)
        throw ParameterError("config: lasso.max_iter must be >= 1");
    if (xcorr.max_lag < 1)
        throw ParameterError("config: xcorr.max_lag must be >= 1");
    if (threads < 1)
        throw ParameterError("config: threads must be >= 1");
}

std::string PipelineConfig::to_json_string() const {
    json j;
    j["seed"] = seed;
    j["threads"] = threads;
    j["graph"] = {{"n_nodes", graph.n_nodes}, {"p_connect", graph.p_connect}};
    j["sim"] = {
        {"duration_ms", sim.duration_ms},
        {"dt_ms", sim.dt_ms},
        {"noise_rate_hz", sim.noise_rate_hz},
        {"record_stride", sim.record_stride},
        {"synaptic_delay_ms", sim.synaptic_delay_ms},
        {"spike_peak_mv", sim.spike_peak_mv},
        {"neuron",
         {{"capacitance_pf", neuron.membrane_capacitance_pf},
          {"leak_conductance_ns", neuron.leak_conductance_ns},
          {"leak_reversal_mv", neuron.leak_reversal_mv},
          {"spike_threshold_mv", neuron.spike_threshold_mv},
          {"reset_potential_mv", neuron.reset_potential_mv},
          {"refractory_ms", neuron.refractory_ms},
          {"bias_mean_pa", neuron.bias_current_mean_pa},
          {"bias_std_pa", neuron.bias_current_std_pa}}},
        {"synapse",
         {{"gmax_ps", edge_synapse.gmax_ps},
          {"r1_per_ms_mm", edge_synapse.r1_per_ms_mm},
          {"r2_per_ms", edge_synapse.r2_per_ms},
          {"r6_per_ms_mm", edge_synapse.r6_per_ms_mm},
          {"pulse_amplitude_mm", edge_synapse.transmitter_pulse_amplitude_mm},
          {"pulse_duration_ms", edge_synapse.transmitter_pulse_duration_ms},
          {"reversal_mv", edge_synapse.reversal_potential_mv}}},
        {"noise_synapse",
         {{"gmax_ps", noise_synapse_params.gmax_ps},
          {"r1_per_ms_mm", noise_synapse_params.r1_per_ms_mm},
          {"r2_per_ms", noise_synapse_params.r2_per_ms},
          {"r6_per_ms_mm", noise_synapse_params.r6_per_ms_mm},
          {"pulse_amplitude_mm", noise_synapse_params.transmitter_pulse_amplitude_mm},
          {"pulse_duration_ms", noise_synapse_params.transmitter_pulse_duration_ms},
          {"reversal_mv", noise_synapse_params.reversal_potential_mv}}}};
    j["events"] = {{"right_deriv_threshold", events.right_deriv_threshold},
                   {"jump_threshold", events.deriv_jump_threshold},
                   {"left_deriv_threshold", events.left_deriv_threshold},
                   {"conditions",
                    {events.use_condition_i, events.use_condition_ii,
                     events.use_condition_iii}},
                   {"deriv_window", events.deriv_window},
                   {"delta_ms", delta_ms},
                   {"spike_threshold_mv", spike_threshold_mv},
                   {"spike_lockout_ms", spike_lockout_ms},
                   {"tag", method_tag}};
    j["lasso"] = {
        {"n_lambdas", lasso.n_lambdas},
        {"lambda_min_ratio", lasso.lambda_min_ratio},
        {"tol_kkt", lasso.tol_kkt},
        {"tol_step", lasso.tol_step},
        {"max_iter", lasso.max_iter},
        {"shared_intercept", lasso.shared_intercept},
        {"weight_rule", lasso.weight_rule == WeightRule::paper_balance ? "balance" : "none"},
        {"topology_rule",
         lasso.topology_rule == TopologyRule::positive ? "positive" : "nonzero"}};
    j["xcorr"] = {{"max_lag", xcorr.max_lag}};
    j["dense_rasters"] = dense_rasters;
    return j.dump(2);
}

PipelineConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(origin, static_cast<long>(e.byte), e.what());
    }

    PipelineConfig cfg;
    Section top(root, "");
    top.get("seed", cfg.seed);
    top.get("threads", cfg.threads);
    top.get("dense_rasters", cfg.dense_rasters);

    if (top.has("graph")) {
        Section s(top.at("graph"), "graph");
        s.get("n_nodes", cfg.graph.n_nodes);
        s.get("p_connect", cfg.graph.p_connect);
    }

    if (top.has("sim")) {
        Section s(top.at("sim"), "sim");
        s.get("duration_ms", cfg.sim.duration_ms);
        s.get("dt_ms", cfg.sim.dt_ms);
        s.get("noise_rate_hz", cfg.sim.noise_rate_hz);
        s.get("record_stride", cfg.sim.record_stride);
        s.get("synaptic_delay_ms", cfg.sim.synaptic_delay_ms);
        s.get("spike_peak_mv", cfg.sim.spike_peak_mv);
        if (s.has("neuron")) {
            Section n(s.at("neuron"), "sim.neuron");
            n.get("capacitance_pf", cfg.neuron.membrane_capacitance_pf);
            n.get("leak_conductance_ns", cfg.neuron.leak_conductance_ns);
            n.get("leak_reversal_mv", cfg.neuron.leak_reversal_mv);
            n.get("spike_threshold_mv", cfg.neuron.spike_threshold_mv);
            n.get("reset_potential_mv", cfg.neuron.reset_potential_mv);
            n.get("refractory_ms", cfg.neuron.refractory_ms);
            n.get("bias_mean_pa", cfg.neuron.bias_current_mean_pa);
            n.get("bias_std_pa", cfg.neuron.bias_current_std_pa);
        }
        if (s.has("synapse"))
            parse_synapse(s.at("synapse"), "sim.synapse", cfg.edge_synapse);
        if (s.has("noise_synapse"))
            parse_synapse(s.at("noise_synapse"), "sim.noise_synapse",
                          cfg.noise_synapse_params);
    }

    if (top.has("events")) {
        Section s(top.at("events"), "events");
        s.get("right_deriv_threshold", cfg.events.right_deriv_threshold);
        s.get("jump_threshold", cfg.events.deriv_jump_threshold);
        s.get("left_deriv_threshold", cfg.events.left_deriv_threshold);
        s.get("deriv_window", cfg.events.deriv_window);
        s.get("delta_ms", cfg.delta_ms);
        s.get("spike_threshold_mv", cfg.spike_threshold_mv);
        s.get("spike_lockout_ms", cfg.spike_lockout_ms);
        s.get("tag", cfg.method_tag);
        if (s.has("conditions")) {
            const auto& c = s.at("conditions");
            if (!c.is_array() || c.size() != 3)
                throw ParameterError(
                    "config: events.conditions must be an array of 3 booleans");
            cfg.events.use_condition_i = c.at(0).get<bool>();
            cfg.events.use_condition_ii = c.at(1).get<bool>();
            cfg.events.use_condition_iii = c.at(2).get<bool>();
        }
    }

    if (top.has("lasso")) {
        Section s(top.at("lasso"), "lasso");
        s.get("n_lambdas", cfg.lasso.n_lambdas);
        s.get("lambda_min_ratio", cfg.lasso.lambda_min_ratio);
        s.get("tol_kkt", cfg.lasso.tol_kkt);
        s.get("tol_step", cfg.lasso.tol_step);
        s.get("max_iter", cfg.lasso.max_iter);
        s.get("shared_intercept", cfg.lasso.shared_intercept);
        if (s.has("weight_rule")) {
            const std::string rule = s.at("weight_rule").get<std::string>();
            if (rule == "balance")
                cfg.lasso.weight_rule = WeightRule::paper_balance;
            else if (rule == "none")
                cfg.lasso.weight_rule = WeightRule::none;
            else
                throw ParameterError("config: lasso.weight_rule must be 'balance' or 'none'");
        }
        if (s.has("topology_rule")) {
            const std::string rule = s.at("topology_rule").get<std::string>();
            if (rule == "positive")
                cfg.lasso.topology_rule = TopologyRule::positive;
            else if (rule == "nonzero")
                cfg.lasso.topology_rule = TopologyRule::nonzero;
            else
                throw ParameterError(
                    "config: lasso.topology_rule must be 'positive' or 'nonzero'");
        }
    }

    if (top.has("xcorr")) {
        Section s(top.at("xcorr"), "xcorr");
        s.get("max_lag", cfg.xcorr.max_lag);
    }

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

} // namespace spikelasso
