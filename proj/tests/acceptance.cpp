// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spikelasso/config.hpp"
#include "spikelasso/eval.hpp"
#include "spikelasso/events.hpp"
#include "spikelasso/io.hpp"
#include "spikelasso/lasso.hpp"
#include "spikelasso/pipeline.hpp"
#include "spikelasso/sim.hpp"
#include "spikelasso/xcorr.hpp"

using namespace spikelasso;
namespace fs = std::filesystem;

namespace {

struct Reporter {
    int failures = 0;

    void run(int index, const std::string& name,
             const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL",
                    index, name.c_str(), secs, detail.empty() ? "" : " -- ",
                    detail.c_str());
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
};

struct SeedRunOutcome {
    double auc_lasso = 0.0;
    double auc_iii = 0.0;
    double auc_xcorr = 0.0;
    bool ppc_perfect_over_first_decile = false;
};

// One desk-scale run: simulate, detect (full conditions and (iii)-only),
// fit both lasso paths, run the correlation baseline, evaluate everything
// against the ground truth.
SeedRunOutcome desk_scale_run(std::uint64_t master_seed) {
    PipelineConfig cfg;
    cfg.seed = master_seed;
    cfg.graph.n_nodes = 10;
    cfg.graph.p_connect = 0.3;
    cfg.sim.duration_ms = 5000.0;
    cfg.threads = 2;

    const auto truth =
        generate_random(cfg.graph.n_nodes, cfg.graph.p_connect, cfg.graph_seed());
    SimConfig sim_cfg = cfg.sim;
    sim_cfg.seed = cfg.sim_seed();
    const auto tr = simulate(truth, cfg.neuron, cfg.edge_synapse,
                             cfg.noise_synapse_params, sim_cfg);

    const auto spikes = detect_spikes(tr, cfg.spike_threshold_mv, cfg.spike_lockout_ms);
    EventDetectorParams iii_only = cfg.events;
    iii_only.use_condition_i = false;
    iii_only.use_condition_ii = false;
    const auto events_full = detect_events(tr, cfg.events);
    const auto events_iii = detect_events(tr, iii_only);

    auto [x, y_full] = bin_processes(spikes, events_full, cfg.graph.n_nodes,
                                     cfg.sim.duration_ms, cfg.delta_ms);
    auto y_iii = bin_processes(spikes, events_iii, cfg.graph.n_nodes,
                               cfg.sim.duration_ms, cfg.delta_ms)
                     .second;

    const auto opts = cfg.solver_options();
    const auto problem_full = build_problem(x, y_full, cfg.lasso.weight_rule);
    const auto path_full = fit_path(problem_full, cfg.lasso.n_lambdas,
                                    cfg.lasso.lambda_min_ratio, opts);
    const auto ranked_full =
        rank_edges_from_path(path_full, cfg.lasso.topology_rule, "lasso");

    const auto problem_iii = build_problem(x, y_iii, cfg.lasso.weight_rule);
    const auto path_iii = fit_path(problem_iii, cfg.lasso.n_lambdas,
                                   cfg.lasso.lambda_min_ratio, opts);
    const auto ranked_iii =
        rank_edges_from_path(path_iii, cfg.lasso.topology_rule, "cond_iii");

    const auto ranked_xcorr =
        rank_edges_from_correlation(cross_correlate(x, cfg.xcorr.max_lag));

    SeedRunOutcome out;
    out.auc_lasso = roc_curve(ranked_full, truth).auc;
    out.auc_iii = roc_curve(ranked_iii, truth).auc;
    out.auc_xcorr = roc_curve(ranked_xcorr, truth).auc;

    const auto ppc = ppc_curve(pad_to_universe(ranked_full, truth.n_nodes), truth);
    const long universe = static_cast<long>(truth.n_nodes) * (truth.n_nodes - 1);
    const long first_decile = universe / 10;
    out.ppc_perfect_over_first_decile = true;
    for (long k = 0; k < first_decile; ++k)
        if (ppc[k].ppc != 1.0)
            out.ppc_perfect_over_first_decile = false;
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    Reporter rep;

    rep.run(1, "analytic gradient matches finite differences (20 seeded problems)",
            [](std::string& detail) {
                const auto start = std::chrono::steady_clock::now();
                double worst = 0.0;
                for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                    const int n = 3 + static_cast<int>(seed % 3); // 3..5 neurons
                    const int bins = 50 + static_cast<int>((seed * 7) % 151); // 50..200
                    const auto problem = oracles::random_problem(
                        n, bins, 1000 + seed, WeightRule::paper_balance);
                    const auto coeffs = oracles::random_coeffs(n, 2000 + seed);
                    const auto analytic = nll(problem, coeffs);
                    const auto fd = oracles::fd_gradient(problem, coeffs, 1e-5);

                    double scale = 0.0, err = 0.0;
                    for (int i = 0; i < n; ++i) {
                        scale = std::max(scale, std::abs(fd.intercepts[i]));
                        err = std::max(err, std::abs(analytic.grad_intercepts[i] -
                                                     fd.intercepts[i]));
                    }
                    for (int s = 0; s < n; ++s) {
                        for (int t = 0; t < n; ++t) {
                            if (s == t)
                                continue;
                            const std::size_t k = static_cast<std::size_t>(s) * n + t;
                            scale = std::max(scale, std::abs(fd.betas[k]));
                            err = std::max(err,
                                           std::abs(analytic.grad_betas[k] - fd.betas[k]));
                        }
                    }
                    worst = std::max(worst, err / scale);
                }
                const double secs = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                detail = "worst relative error " + format_double(worst);
                return worst < 1e-6 && secs < 5.0;
            });

    rep.run(2, "solver optimality: path KKT, empty support at lambda_max, Newton match",
            [](std::string& detail) {
                const auto start = std::chrono::steady_clock::now();

                const auto problem = oracles::random_problem(
                    4, 300, 77, WeightRule::paper_balance);
                const auto path = fit_path(problem, 30, 1e-3);
                double worst_kkt = 0.0;
                for (const auto& fit : path.fits)
                    worst_kkt = std::max(worst_kkt, kkt_violation(problem, fit));
                if (worst_kkt > 1e-4) {
                    detail = "KKT violation " + format_double(worst_kkt);
                    return false;
                }

                const double lmax = lambda_max(problem);
                for (double lambda : {lmax, 2.0 * lmax}) {
                    const auto fit = fit_lasso(problem, lambda);
                    for (int s = 0; s < 4; ++s)
                        for (int t = 0; t < 4; ++t)
                            if (fit.beta(s, t) != 0.0) {
                                detail = "nonzero beta at lambda >= lambda_max";
                                return false;
                            }
                }

                // 2-predictor instance, nearly unpenalized, vs dense Newton.
                const auto tiny = oracles::random_problem(
                    3, 60, 99, WeightRule::paper_balance);
                SolverOptions tight;
                tight.tol_kkt = 1e-7;
                const auto fit =
                    fit_lasso(tiny, lambda_max(tiny) * 1e-6, tight);
                double worst_coeff = 0.0;
                for (int target = 0; target < 3; ++target) {
                    const auto newton = oracles::newton_logistic(tiny, target);
                    worst_coeff = std::max(
                        worst_coeff, std::abs(fit.intercepts[target] - newton[0]));
                    int c = 1;
                    for (int j = 0; j < 3; ++j) {
                        if (j == target)
                            continue;
                        worst_coeff = std::max(
                            worst_coeff, std::abs(fit.beta(j, target) - newton[c]));
                        ++c;
                    }
                }
                const double secs = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                detail = "worst KKT " + format_double(worst_kkt) +
                         ", Newton mismatch " + format_double(worst_coeff);
                return worst_coeff < 1e-4 && secs < 10.0;
            });

    rep.run(3, "balancing weights reproduce the substitution on a 4x3 response",
            [](std::string& detail) {
                BinaryProcessMatrix y;
                y.delta_ms = 1.0;
                y.n_bins = 4;
                y.n_neurons = 3;
                y.kind = ProcessKind::event;
                y.values = {1, 0, 0, //
                            0, 1, 0, //
                            0, 0, 0, //
                            1, 0, 1};
                // 5 ones, 7 zeros: zero-cells weigh 5, one-cells weigh 7.
                const auto raw = balance_weights_raw(y);
                for (std::size_t k = 0; k < y.values.size(); ++k)
                    if (raw[k] != (y.values[k] ? 7.0 : 5.0)) {
                        detail = "raw weight mismatch at cell " + std::to_string(k);
                        return false;
                    }
                BinaryProcessMatrix x = y;
                x.kind = ProcessKind::spike;
                x.values.assign(12, 0);
                const auto problem = build_problem(x, y, WeightRule::paper_balance);
                const double mean = (7.0 * 5.0 + 5.0 * 7.0) / 12.0;
                for (std::size_t k = 0; k < y.values.size(); ++k) {
                    const double expect = (y.values[k] ? 7.0 : 5.0) / mean;
                    if (std::abs(problem.weights[k] - expect) > 1e-15) {
                        detail = "normalized weight mismatch";
                        return false;
                    }
                }
                return true;
            });

    rep.run(4, "event detector matches hand-computed fixture times bin-exactly",
            [](std::string& detail) {
                // Flat then +5 mV/ms at sample 100 (t = 10 ms, dt = 0.1).
                const auto kink = oracles::piecewise_linear_trace(
                    -70.0, {{0.0, 10.0}, {5.0, 5.0}}, 0.1);
                EventDetectorParams p;
                p.right_deriv_threshold = 1.2;
                p.deriv_jump_threshold = 0.9;
                const auto ev = detect_events(kink, p);
                if (ev.size() != 1 || std::abs(ev[0].time_ms - 9.7) > 1e-12) {
                    detail = "kink fixture: expected one event at 9.7 ms";
                    return false;
                }
                auto binned = bin_processes({}, ev, 1, 15.0, 1.0).second;
                if (binned.at(9, 0) != 1 || binned.count_ones() != 1) {
                    detail = "kink fixture: wrong bin";
                    return false;
                }

                // Recovery fixture: minimum is rejected by (iii), the mild
                // convex kink by (ii).
                const auto recovery = oracles::piecewise_linear_trace(
                    -60.0, {{-3.0, 5.0}, {2.0, 5.0}, {2.5, 5.0}}, 0.1);
                EventDetectorParams defaults;
                const auto mask = qualifying_mask(recovery, 0, defaults);
                if (mask[50] != 0 || mask[100] != 0) {
                    detail = "recovery fixture: expected rejections";
                    return false;
                }
                EventDetectorParams no_ii = defaults;
                no_ii.use_condition_ii = false;
                if (qualifying_mask(recovery, 0, no_ii)[100] != 1) {
                    detail = "recovery fixture: (ii) was not the rejecting condition";
                    return false;
                }
                if (!detect_events(oracles::piecewise_linear_trace(-70.0, {{0.0, 20.0}},
                                                                   0.1),
                                   defaults)
                         .empty()) {
                    detail = "constant trace produced events";
                    return false;
                }
                return true;
            });

    rep.run(5, "desk-scale recovery beats the cross-correlation baseline",
            [](std::string& detail) {
                const auto start = std::chrono::steady_clock::now();
                int lasso_wins = 0, ppc_perfect = 0;
                double mean_iii = 0.0, mean_xcorr = 0.0;
                std::string per_seed;
                for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                    const auto r = desk_scale_run(seed);
                    lasso_wins += r.auc_lasso >= r.auc_xcorr ? 1 : 0;
                    ppc_perfect += r.ppc_perfect_over_first_decile ? 1 : 0;
                    mean_iii += r.auc_iii / 5.0;
                    mean_xcorr += r.auc_xcorr / 5.0;
                    per_seed += " seed" + std::to_string(seed) + "(lasso " +
                                format_double(r.auc_lasso) + ", iii " +
                                format_double(r.auc_iii) + ", xcorr " +
                                format_double(r.auc_xcorr) + ")";
                }
                const double secs = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                detail = "lasso>=xcorr on " + std::to_string(lasso_wins) +
                         "/5, ppc=1 over first decile on " +
                         std::to_string(ppc_perfect) + "/5, mean iii " +
                         format_double(mean_iii) + " vs xcorr " +
                         format_double(mean_xcorr) + ";" + per_seed;
                return lasso_wins >= 4 && ppc_perfect >= 3 &&
                       std::abs(mean_iii - mean_xcorr) <= 0.1 && secs < 300.0;
            });

    rep.run(6, "random rankings calibrate to AUC 0.5 and PPC 2p-1",
            [](std::string& detail) {
                // Truth draw with edge count close to the binomial mean.
                const auto truth = generate_random(20, 0.3, 2024);
                std::vector<std::pair<int, int>> pairs;
                for (int s = 0; s < 20; ++s)
                    for (int t = 0; t < 20; ++t)
                        if (s != t)
                            pairs.emplace_back(s, t);
                const long universe = static_cast<long>(pairs.size());

                Rng rng(990);
                double auc_total = 0.0, ppc_tail_total = 0.0;
                const long k_tail = (universe * 9) / 10;
                for (int trial = 0; trial < 1000; ++trial) {
                    oracles::shuffle(pairs, rng);
                    RankedEdgeList ranked;
                    double score = static_cast<double>(universe);
                    for (const auto& [s, t] : pairs)
                        ranked.edges.push_back({s, t, score--});
                    auc_total += roc_curve(ranked, truth).auc;
                    const auto ppc = ppc_curve(ranked, truth);
                    ppc_tail_total += ppc[k_tail - 1].ppc;
                }
                const double mean_auc = auc_total / 1000.0;
                const double mean_ppc = ppc_tail_total / 1000.0;
                detail = "mean AUC " + format_double(mean_auc) + ", tail PPC " +
                         format_double(mean_ppc) + " (truth density " +
                         format_double(static_cast<double>(truth.n_edges()) / universe) +
                         ")";
                return std::abs(mean_auc - 0.5) <= 0.02 &&
                       std::abs(mean_ppc - (-0.4)) <= 0.05;
            });

    rep.run(7, "graph statistics: mean edge count and bidirectional counting",
            [](std::string& detail) {
                long total = 0;
                for (std::uint64_t seed = 0; seed < 1000; ++seed)
                    total += static_cast<long>(generate_random(20, 0.3, seed).n_edges());
                const double mean = static_cast<double>(total) / 1000.0;
                detail = "mean edges " + format_double(mean);
                if (std::abs(mean - 114.0) > 1.0)
                    return false;

                DirectedGraph g;
                g.n_nodes = 4;
                g.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 2}};
                if (count_bidirectional(g) != 2)
                    return false;
                DirectedGraph empty;
                empty.n_nodes = 3;
                if (count_bidirectional(empty) != 0)
                    return false;
                return count_bidirectional(generate_random(5, 1.0, 1)) == 10;
            });

    rep.run(8, "full pipeline runs are byte-identical for one master seed",
            [](std::string& detail) {
                PipelineConfig cfg = parse_config(R"({
                    "seed": 31415,
                    "graph": {"n_nodes": 8, "p_connect": 0.3},
                    "sim": {"duration_ms": 1500},
                    "lasso": {"n_lambdas": 25}
                })");
                const auto base = fs::temp_directory_path() / "spikelasso_acceptance";
                fs::remove_all(base);
                const auto dir1 = base / "run1";
                const auto dir2 = base / "run2";
                run_pipeline(cfg, dir1);
                run_pipeline(cfg, dir2);
                for (const char* name :
                     {"curves_lasso.csv", "curves_xcorr.csv", "summary_lasso.json",
                      "summary_xcorr.json", "ranked_lasso.csv", "ranked_xcorr.csv"}) {
                    if (slurp(dir1 / name) != slurp(dir2 / name)) {
                        detail = std::string("mismatch in ") + name;
                        return false;
                    }
                }
                fs::remove_all(base);
                return true;
            });

    if (rep.failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", rep.failures);
    return 1;
}
