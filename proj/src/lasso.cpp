#include "spikelasso/lasso.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "spikelasso/errors.hpp"

namespace spikelasso {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double soft_threshold(double v, double tau) {
    if (v > tau)
        return v - tau;
    if (v < -tau)
        return v + tau;
    return 0.0;
}

// Intercepts this far out already drive sigmoid to within 1e-16 of 0/1.
constexpr double kInterceptClamp = 37.0;

double safe_logit(double s1, double s0) {
    if (s1 <= 0.0)
        return -kInterceptClamp;
    if (s0 <= 0.0)
        return kInterceptClamp;
    return std::clamp(std::log(s1 / s0), -kInterceptClamp, kInterceptClamp);
}

} // namespace

std::vector<double> balance_weights_raw(const BinaryProcessMatrix& y) {
    const long total = static_cast<long>(y.values.size());
    const long ones = y.count_ones();
    const long zeros = total - ones;
    if (ones == 0 || zeros == 0)
        throw DegenerateDataError(
            "build_problem: the balancing weight rule needs both response "
            "classes, but y has " +
            std::to_string(ones) + " ones out of " + std::to_string(total) +
            " cells");
    std::vector<double> w(y.values.size());
    for (std::size_t k = 0; k < y.values.size(); ++k)
        w[k] = y.values[k] ? static_cast<double>(zeros) : static_cast<double>(ones);
    return w;
}

RegressionProblem build_problem(const BinaryProcessMatrix& x,
                                const BinaryProcessMatrix& y, WeightRule rule) {
    if (x.n_bins != y.n_bins || x.n_neurons != y.n_neurons)
        throw DataError("build_problem: x and y shapes differ");
    if (x.delta_ms != y.delta_ms)
        throw DataError("build_problem: x and y bin widths differ");
    if (x.n_bins < 2)
        throw DataError("build_problem: need at least 2 bins for the lag-one model");

    RegressionProblem p;
    p.x = x;
    p.y = y;
    if (rule == WeightRule::none) {
        p.weights.assign(x.values.size(), 1.0);
    } else {
        p.weights = balance_weights_raw(y);
        const double mean =
            std::accumulate(p.weights.begin(), p.weights.end(), 0.0) /
            static_cast<double>(p.weights.size());
        for (double& w : p.weights)
            w /= mean;
    }
    return p;
}

CoefficientSet CoefficientSet::zeros(int n_neurons, double lambda) {
    CoefficientSet c;
    c.n_neurons = n_neurons;
    c.lambda = lambda;
    c.intercepts.assign(n_neurons, 0.0);
    c.betas.assign(static_cast<std::size_t>(n_neurons) * n_neurons, 0.0);
    return c;
}

NllResult nll(const RegressionProblem& problem, const CoefficientSet& coeffs) {
    const int n = problem.n_neurons();
    const int m_bins = problem.n_bins();
    if (coeffs.n_neurons != n)
        throw DataError("nll: coefficient shape does not match problem");
    for (double v : coeffs.intercepts)
        if (!std::isfinite(v))
            throw NumericError("nll: non-finite intercept");
    for (double v : coeffs.betas)
        if (!std::isfinite(v))
            throw NumericError("nll: non-finite beta");

    NllResult r;
    r.grad_intercepts.assign(n, 0.0);
    r.grad_betas.assign(static_cast<std::size_t>(n) * n, 0.0);

    // Response bin m+1 is predicted from spike bin m, weighted by the
    // weight stored at the predictor bin.
    for (int m = 0; m + 1 < m_bins; ++m) {
        for (int i = 0; i < n; ++i) {
            double eta = coeffs.intercepts[i];
            for (int j = 0; j < n; ++j) {
                if (j != i && problem.x.at(m, j))
                    eta += coeffs.beta(j, i);
            }
            const double w = problem.weight_at(m, i);
            const double yv = problem.y.at(m + 1, i) ? 1.0 : 0.0;
            r.value += w * (yv * softplus(-eta) + (1.0 - yv) * softplus(eta));
            const double deta = w * (sigmoid(eta) - yv);
            r.grad_intercepts[i] += deta;
            for (int j = 0; j < n; ++j) {
                if (j != i && problem.x.at(m, j))
                    r.grad_betas[static_cast<std::size_t>(j) * n + i] += deta;
            }
        }
    }
    return r;
}

namespace {

// ---------------------------------------------------------------------
// Per-target subproblem on an aggregated representation.
//
// The loss for target i only sees the predictor row through the set of
// active sources, so rows sharing a spike pattern share their linear
// predictor. Grouping rows by pattern turns M-1 per-row terms into one
// term per distinct pattern with accumulated response mass (s1 = sum of
// w*y, s0 = sum of w*(1-y)), which is exact and much smaller.
// ---------------------------------------------------------------------

struct Pattern {
    std::vector<int> sources; // compact predictor indices, ascending
    double s1 = 0.0;
    double s0 = 0.0;
};

struct TargetData {
    int target = 0;
    int n_pred = 0;
    std::vector<Pattern> patterns;
    double total_s1 = 0.0;
    double total_s0 = 0.0;

    // theta layout: [intercept, beta_0 .. beta_{n_pred-1}]
    double loss(const std::vector<double>& theta,
                std::vector<double>& eta_buf) const {
        double f = 0.0;
        eta_buf.resize(patterns.size());
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            double eta = theta[0];
            for (int c : patterns[p].sources)
                eta += theta[1 + c];
            eta_buf[p] = eta;
            f += patterns[p].s1 * softplus(-eta) + patterns[p].s0 * softplus(eta);
        }
        return f;
    }

    double loss_grad(const std::vector<double>& theta, std::vector<double>& g,
                     std::vector<double>& eta_buf) const {
        const double f = loss(theta, eta_buf);
        g.assign(theta.size(), 0.0);
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            const auto& pat = patterns[p];
            const double deta = (pat.s1 + pat.s0) * sigmoid(eta_buf[p]) - pat.s1;
            g[0] += deta;
            for (int c : pat.sources)
                g[1 + c] += deta;
        }
        return f;
    }
};

TargetData build_target_data(const RegressionProblem& problem, int target) {
    const int n = problem.n_neurons();
    const int m_bins = problem.n_bins();
    TargetData d;
    d.target = target;
    d.n_pred = n - 1;

    std::map<std::vector<int>, std::pair<double, double>> acc;
    std::vector<int> key;
    for (int m = 0; m + 1 < m_bins; ++m) {
        key.clear();
        for (int j = 0; j < n; ++j) {
            if (j != target && problem.x.at(m, j))
                key.push_back(j < target ? j : j - 1);
        }
        const double w = problem.weight_at(m, target);
        auto& cell = acc[key];
        if (problem.y.at(m + 1, target))
            cell.first += w;
        else
            cell.second += w;
    }
    d.patterns.reserve(acc.size());
    for (auto& [sources, mass] : acc) {
        Pattern p;
        p.sources = sources;
        p.s1 = mass.first;
        p.s0 = mass.second;
        d.total_s1 += p.s1;
        d.total_s0 += p.s0;
        d.patterns.push_back(std::move(p));
    }
    return d;
}

// ---------------------------------------------------------------------
// Joint loss over the full coefficient matrix, through nll(). Reference
// path for the separability check and the only path supporting a shared
// intercept. theta layout: [intercepts..., betas packed source-major
// excluding the diagonal].
// ---------------------------------------------------------------------

struct JointLoss {
    const RegressionProblem* problem = nullptr;
    int n = 0;
    bool shared_intercept = false;

    int n_intercepts() const { return shared_intercept ? 1 : n; }
    std::size_t size() const {
        return n_intercepts() + static_cast<std::size_t>(n) * (n - 1);
    }
    std::size_t beta_index(int s, int t) const {
        return n_intercepts() + static_cast<std::size_t>(s) * (n - 1) +
               (t < s ? t : t - 1);
    }

    CoefficientSet unpack(const std::vector<double>& theta, double lambda) const {
        CoefficientSet c = CoefficientSet::zeros(n, lambda);
        for (int i = 0; i < n; ++i)
            c.intercepts[i] = shared_intercept ? theta[0] : theta[i];
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t)
                if (s != t)
                    c.beta(s, t) = theta[beta_index(s, t)];
        return c;
    }

    double loss(const std::vector<double>& theta) const {
        return nll(*problem, unpack(theta, 0.0)).value;
    }

    double loss_grad(const std::vector<double>& theta, std::vector<double>& g) const {
        NllResult r = nll(*problem, unpack(theta, 0.0));
        g.assign(size(), 0.0);
        for (int i = 0; i < n; ++i)
            g[shared_intercept ? 0 : i] += r.grad_intercepts[i];
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t)
                if (s != t)
                    g[beta_index(s, t)] = r.grad_betas[static_cast<std::size_t>(s) * n + t];
        return r.value;
    }
};

// ---------------------------------------------------------------------
// Accelerated proximal gradient with backtracking and adaptive restart.
// Penalized coordinates get soft-thresholding; the rest take plain
// gradient steps. Termination is the KKT certificate itself.
// ---------------------------------------------------------------------

double kkt_from_grad(const std::vector<double>& theta, const std::vector<double>& g,
                     const std::vector<std::uint8_t>& penalized, double lambda) {
    double worst = 0.0;
    for (std::size_t c = 0; c < theta.size(); ++c) {
        double v;
        if (!penalized[c])
            v = std::abs(g[c]);
        else if (theta[c] == 0.0)
            v = std::max(0.0, std::abs(g[c]) - lambda);
        else
            v = std::abs(g[c] + lambda * (theta[c] > 0.0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

struct SolveOutcome {
    std::vector<double> theta;
    bool converged = false;
    double worst_kkt = 0.0;
    long iterations = 0;
};

template <typename Loss>
SolveOutcome solve_prox(const Loss& loss_fn, std::vector<double> theta0,
                        const std::vector<std::uint8_t>& penalized, double lambda,
                        const SolverOptions& opts) {
    constexpr bool buffered = requires(const Loss& l, const std::vector<double>& a,
                                       std::vector<double>& b, std::vector<double>& c) {
        l.loss_grad(a, b, c);
    };
    auto eval_grad = [&](const std::vector<double>& th, std::vector<double>& g) {
        if constexpr (buffered) {
            thread_local std::vector<double> eta_buf;
            return loss_fn.loss_grad(th, g, eta_buf);
        } else {
            return loss_fn.loss_grad(th, g);
        }
    };
    auto eval_loss = [&](const std::vector<double>& th) {
        if constexpr (buffered) {
            thread_local std::vector<double> eta_buf;
            return loss_fn.loss(th, eta_buf);
        } else {
            return loss_fn.loss(th);
        }
    };

    const std::size_t dim = theta0.size();
    std::vector<double> x_prev = theta0;  // last accepted iterate
    std::vector<double> y = theta0;       // extrapolated point
    std::vector<double> z(dim), g(dim), g_at_z(dim);
    double momentum_t = 1.0;
    double step = 1.0;

    SolveOutcome out;
    out.theta = theta0;

    // Certificate at the starting point: warm starts frequently already
    // satisfy it.
    eval_grad(theta0, g);
    out.worst_kkt = kkt_from_grad(theta0, g, penalized, lambda);
    if (out.worst_kkt <= opts.tol_kkt) {
        out.converged = true;
        return out;
    }

    for (long iter = 1; iter <= opts.max_iter; ++iter) {
        const double f_y = eval_grad(y, g);

        // Backtracking line search on the majorization at y. The step is
        // never regrown: the logistic curvature is largest near the
        // balanced starting point, so the first accepted step stays valid
        // and a monotone step avoids acceptance-slack limit cycles.
        double fz = 0.0;
        for (;;) {
            for (std::size_t c = 0; c < dim; ++c) {
                const double v = y[c] - step * g[c];
                z[c] = penalized[c] ? soft_threshold(v, step * lambda) : v;
            }
            fz = eval_loss(z);
            double lin = 0.0, quad = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double d = z[c] - y[c];
                lin += g[c] * d;
                quad += d * d;
            }
            if (fz <= f_y + lin + quad / (2.0 * step) + 4e-15 * (1.0 + std::abs(f_y)))
                break;
            step *= 0.5;
            if (step < 1e-18)
                break;
        }

        double delta = 0.0;
        double restart_dot = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double dz = z[c] - x_prev[c];
            delta = std::max(delta, std::abs(dz));
            restart_dot += (y[c] - z[c]) * dz;
        }

        // Check the certificate at the accepted iterate, always when the
        // step has shrunk below tol_step and periodically otherwise.
        const bool check = delta < opts.tol_step || iter % 8 == 0;
        if (check) {
            eval_grad(z, g_at_z);
            out.worst_kkt = kkt_from_grad(z, g_at_z, penalized, lambda);
            if (out.worst_kkt <= opts.tol_kkt) {
                out.theta = z;
                out.converged = true;
                out.iterations = iter;
                return out;
            }
        }

        // Nesterov momentum with gradient-based adaptive restart.
        if (restart_dot > 0.0) {
            momentum_t = 1.0;
            y = z;
        } else {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t)) / 2.0;
            const double gamma = (momentum_t - 1.0) / t_next;
            for (std::size_t c = 0; c < dim; ++c)
                y[c] = z[c] + gamma * (z[c] - x_prev[c]);
            momentum_t = t_next;
        }
        x_prev = z;
        out.theta = z;
        out.iterations = iter;
    }

    eval_grad(out.theta, g);
    out.worst_kkt = kkt_from_grad(out.theta, g, penalized, lambda);
    out.converged = out.worst_kkt <= opts.tol_kkt;
    return out;
}

std::vector<std::uint8_t> penalized_mask(std::size_t dim, std::size_t n_unpenalized) {
    std::vector<std::uint8_t> mask(dim, 1);
    for (std::size_t c = 0; c < n_unpenalized; ++c)
        mask[c] = 0;
    return mask;
}

// Runs fn(i) for i in [0, n) across up to `threads` workers. Results must
// not depend on scheduling; each index touches disjoint state.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

double target_lambda_max(const TargetData& d) {
    if (d.total_s1 <= 0.0 || d.total_s0 <= 0.0)
        return 0.0;
    const double b0 = safe_logit(d.total_s1, d.total_s0);
    std::vector<double> g(1 + d.n_pred, 0.0);
    for (const auto& p : d.patterns) {
        const double deta = (p.s1 + p.s0) * sigmoid(b0) - p.s1;
        for (int c : p.sources)
            g[1 + c] += deta;
    }
    double worst = 0.0;
    for (int c = 0; c < d.n_pred; ++c)
        worst = std::max(worst, std::abs(g[1 + c]));
    return worst;
}

std::vector<double> compact_start(const TargetData& d, const CoefficientSet* warm,
                                  int n) {
    std::vector<double> theta(1 + d.n_pred, 0.0);
    if (warm) {
        theta[0] = warm->intercepts[d.target];
        for (int c = 0; c < d.n_pred; ++c) {
            const int j = c < d.target ? c : c + 1;
            theta[1 + c] = warm->beta(j, d.target);
        }
        (void)n;
    } else {
        theta[0] = safe_logit(d.total_s1, d.total_s0);
    }
    return theta;
}

} // namespace

double lambda_max(const RegressionProblem& problem, const SolverOptions& opts) {
    const int n = problem.n_neurons();
    if (opts.shared_intercept) {
        // One intercept for everyone: the intercept-only optimum is the
        // logit of the pooled weighted response rate.
        double s1 = 0.0, s0 = 0.0;
        std::vector<TargetData> data;
        data.reserve(n);
        for (int i = 0; i < n; ++i) {
            data.push_back(build_target_data(problem, i));
            s1 += data.back().total_s1;
            s0 += data.back().total_s0;
        }
        const double b0 = safe_logit(s1, s0);
        double worst = 0.0;
        for (const auto& d : data) {
            std::vector<double> g(1 + d.n_pred, 0.0);
            for (const auto& p : d.patterns) {
                const double deta = (p.s1 + p.s0) * sigmoid(b0) - p.s1;
                for (int c : p.sources)
                    g[1 + c] += deta;
            }
            for (int c = 0; c < d.n_pred; ++c)
                worst = std::max(worst, std::abs(g[1 + c]));
        }
        return worst;
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, target_lambda_max(build_target_data(problem, i)));
    return worst;
}

double kkt_violation(const RegressionProblem& problem, const CoefficientSet& coeffs,
                     bool shared_intercept) {
    const int n = coeffs.n_neurons;
    NllResult r = nll(problem, coeffs);
    double worst = 0.0;
    if (shared_intercept) {
        double g0 = 0.0;
        for (double gi : r.grad_intercepts)
            g0 += gi;
        worst = std::abs(g0);
    } else {
        for (double gi : r.grad_intercepts)
            worst = std::max(worst, std::abs(gi));
    }
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s == t)
                continue;
            const double b = coeffs.beta(s, t);
            const double g = r.grad_betas[static_cast<std::size_t>(s) * n + t];
            double v;
            if (b == 0.0)
                v = std::max(0.0, std::abs(g) - coeffs.lambda);
            else
                v = std::abs(g + coeffs.lambda * (b > 0.0 ? 1.0 : -1.0));
            worst = std::max(worst, v);
        }
    }
    return worst;
}

double penalized_objective(const RegressionProblem& problem,
                           const CoefficientSet& coeffs) {
    double l1 = 0.0;
    for (int s = 0; s < coeffs.n_neurons; ++s)
        for (int t = 0; t < coeffs.n_neurons; ++t)
            if (s != t)
                l1 += std::abs(coeffs.beta(s, t));
    return nll(problem, coeffs).value + coeffs.lambda * l1;
}

CoefficientSet fit_lasso(const RegressionProblem& problem, double lambda,
                         const SolverOptions& opts, const CoefficientSet* warm_start) {
    if (!(lambda >= 0.0))
        throw ParameterError("fit_lasso: lambda must be >= 0");
    const int n = problem.n_neurons();

    if (opts.mode == SolverOptions::Mode::joint || opts.shared_intercept) {
        JointLoss loss{&problem, n, opts.shared_intercept};
        std::vector<double> theta0(loss.size(), 0.0);
        if (warm_start) {
            for (int i = 0; i < loss.n_intercepts(); ++i)
                theta0[i] = warm_start->intercepts[opts.shared_intercept ? 0 : i];
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t)
                    if (s != t)
                        theta0[loss.beta_index(s, t)] = warm_start->beta(s, t);
        }
        const auto mask = penalized_mask(loss.size(), loss.n_intercepts());
        auto res = solve_prox(loss, std::move(theta0), mask, lambda, opts);
        if (!res.converged)
            throw ConvergenceError(
                "fit_lasso: joint solver hit the iteration cap at lambda=" +
                    std::to_string(lambda) + ", worst KKT violation " +
                    std::to_string(res.worst_kkt),
                res.worst_kkt);
        return loss.unpack(res.theta, lambda);
    }

    CoefficientSet fit = CoefficientSet::zeros(n, lambda);
    std::vector<std::string> failures(n);
    parallel_for(n, opts.threads, [&](int i) {
        TargetData data = build_target_data(problem, i);
        auto theta0 = compact_start(data, warm_start, n);
        const auto mask = penalized_mask(theta0.size(), 1);
        auto res = solve_prox(data, std::move(theta0), mask, lambda, opts);
        if (!res.converged)
            throw ConvergenceError(
                "fit_lasso: target " + std::to_string(i) +
                    " hit the iteration cap at lambda=" + std::to_string(lambda) +
                    ", worst KKT violation " + std::to_string(res.worst_kkt),
                res.worst_kkt);
        fit.intercepts[i] = res.theta[0];
        for (int c = 0; c < data.n_pred; ++c) {
            const int j = c < i ? c : c + 1;
            fit.beta(j, i) = res.theta[1 + c];
        }
    });
    return fit;
}

LambdaPath fit_path(const RegressionProblem& problem, int n_lambdas,
                    double lambda_min_ratio, const SolverOptions& opts) {
    if (n_lambdas < 2)
        throw ParameterError("fit_path: n_lambdas must be >= 2");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
        throw ParameterError("fit_path: lambda_min_ratio must lie in (0, 1)");

    const int n = problem.n_neurons();
    const double lmax = lambda_max(problem, opts);
    if (!(lmax > 0.0))
        throw DegenerateDataError(
            "fit_path: lambda_max is zero; no predictor carries any signal");

    LambdaPath path;
    path.lambdas.resize(n_lambdas);
    for (int k = 0; k < n_lambdas; ++k)
        path.lambdas[k] =
            lmax * std::pow(lambda_min_ratio, static_cast<double>(k) / (n_lambdas - 1));
    for (int k = 0; k < n_lambdas; ++k)
        path.fits.push_back(CoefficientSet::zeros(n, path.lambdas[k]));

    if (opts.mode == SolverOptions::Mode::joint || opts.shared_intercept) {
        const CoefficientSet* warm = nullptr;
        for (int k = 0; k < n_lambdas; ++k) {
            path.fits[k] = fit_lasso(problem, path.lambdas[k], opts, warm);
            warm = &path.fits[k];
        }
        return path;
    }

    // Per-target mode: each target walks the whole path with its own warm
    // starts; targets are independent, so they may run in parallel.
    parallel_for(n, opts.threads, [&](int i) {
        TargetData data = build_target_data(problem, i);
        auto theta = compact_start(data, nullptr, n);
        const auto mask = penalized_mask(theta.size(), 1);
        for (int k = 0; k < n_lambdas; ++k) {
            auto res = solve_prox(data, theta, mask, path.lambdas[k], opts);
            if (!res.converged)
                throw ConvergenceError(
                    "fit_path: target " + std::to_string(i) +
                        " hit the iteration cap at lambda=" +
                        std::to_string(path.lambdas[k]) + ", worst KKT violation " +
                        std::to_string(res.worst_kkt),
                    res.worst_kkt);
            theta = res.theta;
            path.fits[k].intercepts[i] = theta[0];
            for (int c = 0; c < data.n_pred; ++c) {
                const int j = c < i ? c : c + 1;
                path.fits[k].beta(j, i) = theta[1 + c];
            }
        }
    });
    return path;
}

DirectedGraph estimate_topology(const CoefficientSet& coeffs, TopologyRule rule) {
    DirectedGraph g;
    g.n_nodes = coeffs.n_neurons;
    for (int s = 0; s < coeffs.n_neurons; ++s) {
        for (int t = 0; t < coeffs.n_neurons; ++t) {
            if (s == t)
                continue;
            const double b = coeffs.beta(s, t);
            const bool in = rule == TopologyRule::positive ? b > 0.0 : b != 0.0;
            if (in)
                g.edges.emplace_back(s, t);
        }
    }
    return g;
}

RankedEdgeList rank_edges_from_path(const LambdaPath& path, TopologyRule rule,
                                    const std::string& method_tag) {
    if (path.fits.empty())
        throw DataError("rank_edges_from_path: empty path");
    const int n = path.fits.front().n_neurons;
    const auto& final_fit = path.fits.back();

    struct Entry {
        int source, target;
        int entry_index;
        double final_abs_beta;
    };
    std::vector<Entry> entries;
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s == t)
                continue;
            int entry_index = -1;
            for (std::size_t k = 0; k < path.fits.size(); ++k) {
                const double b = path.fits[k].beta(s, t);
                const bool in = rule == TopologyRule::positive ? b > 0.0 : b != 0.0;
                if (in) {
                    entry_index = static_cast<int>(k);
                    break;
                }
            }
            if (entry_index >= 0)
                entries.push_back({s, t, entry_index, std::abs(final_fit.beta(s, t))});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.entry_index != b.entry_index)
            return a.entry_index < b.entry_index;
        if (a.final_abs_beta != b.final_abs_beta)
            return a.final_abs_beta > b.final_abs_beta;
        return std::make_pair(a.source, a.target) < std::make_pair(b.source, b.target);
    });

    RankedEdgeList out;
    out.method_tag = method_tag;
    for (const auto& e : entries)
        out.edges.push_back({e.source, e.target, path.lambdas[e.entry_index]});
    return out;
}

} // namespace spikelasso
