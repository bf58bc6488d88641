// Command-line front end for the pipeline. Each subcommand wraps one
// file-based stage; `pipeline` runs them all in order.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spikelasso/config.hpp"
#include "spikelasso/errors.hpp"
#include "spikelasso/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string in_dir;
    bool have_seed = false;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string conditions;
    std::string tag;
    bool dense = false;
    bool shared_intercept = false;
    std::string topology_rule;

    double duration_ms = -1.0;
    int n_nodes = -1;
    double p_connect = -1.0;
    double noise_rate_hz = -1.0;
    double delta_ms = -1.0;
    int n_lambdas = -1;
    int max_lag = -1;
};

void add_common_options(CLI::App* cmd, CommonArgs& a, bool needs_input) {
    cmd->add_option("--config", a.config_path, "JSON config file");
    cmd->add_option("--out", a.out_dir, "output directory");
    if (needs_input)
        cmd->add_option("--in", a.in_dir, "input directory (defaults to --out)");
    cmd->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) {
        a.have_seed = true;
    });
    cmd->add_option("--threads", a.threads, "worker threads for the lasso path");
    cmd->add_option("--duration", a.duration_ms, "simulation duration (ms)");
    cmd->add_option("--n-nodes", a.n_nodes, "number of neurons");
    cmd->add_option("--p-connect", a.p_connect, "connection probability");
    cmd->add_option("--noise-rate", a.noise_rate_hz, "Poisson noise rate (Hz/neuron)");
    cmd->add_option("--delta", a.delta_ms, "bin width (ms)");
    cmd->add_option("--n-lambdas", a.n_lambdas, "penalty path length");
    cmd->add_option("--max-lag", a.max_lag, "cross-correlation lag range (bins)");
    cmd->add_option("--conditions", a.conditions,
                    "enabled detector conditions, e.g. 'i,ii,iii' or 'iii'");
    cmd->add_option("--tag", a.tag, "method tag used in output file names");
    cmd->add_flag("--dense", a.dense, "write dense raster matrices");
    cmd->add_flag("--shared-intercept", a.shared_intercept,
                  "share one intercept across all target neurons");
    cmd->add_option("--topology-rule", a.topology_rule,
                    "edge rule: 'positive' (beta > 0) or 'nonzero'");
}

spikelasso::PipelineConfig resolve_config(const CommonArgs& a) {
    using spikelasso::ParameterError;
    spikelasso::PipelineConfig cfg;
    if (!a.config_path.empty())
        cfg = spikelasso::load_config(a.config_path);
    if (a.have_seed)
        cfg.seed = a.seed;
    if (a.threads > 0)
        cfg.threads = a.threads;
    if (a.duration_ms >= 0.0)
        cfg.sim.duration_ms = a.duration_ms;
    if (a.n_nodes >= 0)
        cfg.graph.n_nodes = a.n_nodes;
    if (a.p_connect >= 0.0)
        cfg.graph.p_connect = a.p_connect;
    if (a.noise_rate_hz >= 0.0)
        cfg.sim.noise_rate_hz = a.noise_rate_hz;
    if (a.delta_ms >= 0.0)
        cfg.delta_ms = a.delta_ms;
    if (a.n_lambdas >= 0)
        cfg.lasso.n_lambdas = a.n_lambdas;
    if (a.max_lag >= 0)
        cfg.xcorr.max_lag = a.max_lag;
    if (a.dense)
        cfg.dense_rasters = true;
    if (a.shared_intercept)
        cfg.lasso.shared_intercept = true;
    if (!a.tag.empty())
        cfg.method_tag = a.tag;
    if (!a.topology_rule.empty()) {
        if (a.topology_rule == "positive")
            cfg.lasso.topology_rule = spikelasso::TopologyRule::positive;
        else if (a.topology_rule == "nonzero")
            cfg.lasso.topology_rule = spikelasso::TopologyRule::nonzero;
        else
            throw ParameterError("--topology-rule must be 'positive' or 'nonzero'");
    }
    if (!a.conditions.empty()) {
        cfg.events.use_condition_i = false;
        cfg.events.use_condition_ii = false;
        cfg.events.use_condition_iii = false;
        std::string tok;
        std::stringstream ss(a.conditions);
        while (std::getline(ss, tok, ',')) {
            if (tok == "i")
                cfg.events.use_condition_i = true;
            else if (tok == "ii")
                cfg.events.use_condition_ii = true;
            else if (tok == "iii")
                cfg.events.use_condition_iii = true;
            else
                throw ParameterError("--conditions tokens must be i, ii or iii");
        }
    }
    cfg.validate();
    return cfg;
}

std::string input_dir(const CommonArgs& a) {
    return a.in_dir.empty() ? a.out_dir : a.in_dir;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directed-network topology reconstruction from simulated voltage "
                 "traces: penalized logistic inference with a cross-correlation "
                 "baseline and ROC/PPC scoring"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string ranked_csv, truth_json;

    auto* c_sim = app.add_subcommand("simulate", "generate a network and simulate traces");
    add_common_options(c_sim, args, false);
    auto* c_detect = app.add_subcommand("detect", "detect spikes/events and bin them");
    add_common_options(c_detect, args, true);
    auto* c_infer = app.add_subcommand("infer", "fit the penalty path and rank edges");
    add_common_options(c_infer, args, true);
    auto* c_base = app.add_subcommand("baseline", "cross-correlation edge ranking");
    add_common_options(c_base, args, true);
    auto* c_eval = app.add_subcommand("evaluate", "score a ranking against the truth");
    add_common_options(c_eval, args, true);
    c_eval->add_option("--ranked", ranked_csv, "ranked edge CSV")->required();
    c_eval->add_option("--truth", truth_json, "ground-truth graph JSON")->required();
    auto* c_pipe = app.add_subcommand("pipeline", "run every stage in order");
    add_common_options(c_pipe, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = resolve_config(args);
        if (c_sim->parsed()) {
            spikelasso::run_simulate_stage(cfg, args.out_dir);
            std::cout << cfg.to_json_string() << "\n";
        } else if (c_detect->parsed()) {
            spikelasso::run_detect_stage(cfg, input_dir(args), args.out_dir);
        } else if (c_infer->parsed()) {
            spikelasso::run_infer_stage(cfg, input_dir(args), args.out_dir);
        } else if (c_base->parsed()) {
            spikelasso::run_baseline_stage(cfg, input_dir(args), args.out_dir);
        } else if (c_eval->parsed()) {
            spikelasso::run_evaluate_stage(cfg, ranked_csv, truth_json, args.out_dir,
                                           cfg.method_tag);
        } else if (c_pipe->parsed()) {
            spikelasso::run_pipeline(cfg, args.out_dir);
        }
    } catch (const spikelasso::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
