#pragma once

#include <string>
#include <vector>

#include "spikelasso/events.hpp"
#include "spikelasso/graph.hpp"

namespace spikelasso {

enum class WeightRule { none, paper_balance };

/// Weighted lag-one logistic regression data. The predictor for response
/// bin m+1 is the spike row at bin m, so the M-bin matrices yield M-1
/// regression rows. Weights are stored for every (bin, neuron) cell; the
/// loss for response y(m+1, i) uses the weight at the predictor bin,
/// weights(m, i).
struct RegressionProblem {
    BinaryProcessMatrix x; // spikes, predictors
    BinaryProcessMatrix y; // events, responses
    std::vector<double> weights; // row-major bins x neurons, strictly positive

    int n_bins() const { return x.n_bins; }
    int n_neurons() const { return x.n_neurons; }
    double weight_at(int bin, int neuron) const {
        return weights[static_cast<std::size_t>(bin) * x.n_neurons + neuron];
    }
};

/// The balancing weights before normalization: cell (m, i) gets the total
/// number of 1s in y if y(m,i) = 0, and the total number of 0s if
/// y(m,i) = 1. Integer-valued.
std::vector<double> balance_weights_raw(const BinaryProcessMatrix& y);

/// Assemble the regression problem. With WeightRule::paper_balance the
/// raw balancing weights are divided by their overall mean so the loss
/// scale does not grow with the bin or neuron count; with
/// WeightRule::none all weights are 1.
/// Throws DegenerateDataError when y is all zeros or all ones (the
/// balance rule would assign zero weight to one class).
RegressionProblem build_problem(const BinaryProcessMatrix& x,
                                const BinaryProcessMatrix& y, WeightRule rule);

/// Intercept-per-target plus a source x target coefficient matrix. The
/// diagonal (autapses) is structurally excluded: it is stored as zero and
/// never enters the model, the penalty, or the gradient.
struct CoefficientSet {
    int n_neurons = 0;
    double lambda = 0.0;
    std::vector<double> intercepts;
    std::vector<double> betas; // row-major source x target

    static CoefficientSet zeros(int n_neurons, double lambda = 0.0);
    double beta(int source, int target) const {
        return betas[static_cast<std::size_t>(source) * n_neurons + target];
    }
    double& beta(int source, int target) {
        return betas[static_cast<std::size_t>(source) * n_neurons + target];
    }
};

struct NllResult {
    double value = 0.0;
    std::vector<double> grad_intercepts;
    std::vector<double> grad_betas; // source x target, diagonal fixed at 0
};

/// Negative weighted log-likelihood of the lag-one logit model plus its
/// exact gradient. Terms are evaluated through softplus of the linear
/// predictor, never by exponentiating and taking logs.
NllResult nll(const RegressionProblem& problem, const CoefficientSet& coeffs);

struct SolverOptions {
    double tol_kkt = 1e-4;
    double tol_step = 1e-7;
    long max_iter = 100000;
    /// Share one intercept across all targets (the literal model reading)
    /// instead of the default per-target intercepts. Forces joint mode.
    bool shared_intercept = false;
    /// joint: proximal gradient on the full coefficient matrix through
    /// nll(). per_target: the same iteration run independently per target
    /// on an aggregated representation; the problems coincide because the
    /// loss and penalty are separable across targets.
    enum class Mode { per_target, joint } mode = Mode::per_target;
    int threads = 1;
};

/// Smallest penalty at which the optimum has every beta equal to zero:
/// the largest |d nll / d beta| at the intercept-only optimum.
double lambda_max(const RegressionProblem& problem,
                  const SolverOptions& opts = {});

/// Proximal-gradient (soft-thresholding, backtracking line search) fit of
///   L(beta, lambda) = nll(beta) + lambda * sum_{j != i} |beta(j,i)|
/// with unpenalized intercepts. The returned fit satisfies the KKT
/// certificate at opts.tol_kkt; otherwise a ConvergenceError reporting
/// the worst violation is thrown.
CoefficientSet fit_lasso(const RegressionProblem& problem, double lambda,
                         const SolverOptions& opts = {},
                         const CoefficientSet* warm_start = nullptr);

/// Largest first-order optimality violation of coeffs for the penalized
/// problem at coeffs.lambda. Zero at an exact optimum.
double kkt_violation(const RegressionProblem& problem,
                     const CoefficientSet& coeffs,
                     bool shared_intercept = false);

/// Penalized objective value L(coeffs, coeffs.lambda).
double penalized_objective(const RegressionProblem& problem,
                           const CoefficientSet& coeffs);

struct LambdaPath {
    std::vector<double> lambdas; // strictly decreasing
    std::vector<CoefficientSet> fits;
};

/// Fit a log-spaced path from lambda_max down to
/// lambda_max * lambda_min_ratio, warm-starting each fit from the
/// previous one.
LambdaPath fit_path(const RegressionProblem& problem, int n_lambdas,
                    double lambda_min_ratio, const SolverOptions& opts = {});

enum class TopologyRule { positive, nonzero };

/// Edge set read off the coefficients: beta(j,i) > 0 under
/// TopologyRule::positive (the default), beta(j,i) != 0 under
/// TopologyRule::nonzero.
DirectedGraph estimate_topology(const CoefficientSet& coeffs, TopologyRule rule);

struct RankedEdge {
    int source = 0;
    int target = 0;
    double score = 0.0;
};

/// Scored edge list, scores nonincreasing.
struct RankedEdgeList {
    std::vector<RankedEdge> edges;
    std::string method_tag;
};

/// Edges ordered by the lambda at which they first enter the estimated
/// topology (largest entry lambda first, used as the score); ties broken
/// by |beta| at the final lambda, then by (source, target). Edges that
/// never enter are omitted.
RankedEdgeList rank_edges_from_path(const LambdaPath& path,
                                    TopologyRule rule = TopologyRule::positive,
                                    const std::string& method_tag = "lasso");

} // namespace spikelasso
