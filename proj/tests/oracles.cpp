#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

using namespace spikelasso;

double direct_nll(const RegressionProblem& problem, const CoefficientSet& coeffs) {
    const int n = problem.n_neurons();
    double total = 0.0;
    for (int m = 0; m + 1 < problem.n_bins(); ++m) {
        for (int i = 0; i < n; ++i) {
            double eta = coeffs.intercepts[i];
            for (int j = 0; j < n; ++j)
                if (j != i && problem.x.at(m, j))
                    eta += coeffs.beta(j, i);
            // pi = 1 / (1 + exp(-eta)), in a form that stays finite.
            const double y = problem.y.at(m + 1, i) ? 1.0 : 0.0;
            const double log_pi =
                eta > 0.0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
            const double log_1mpi =
                eta > 0.0 ? -eta - std::log1p(std::exp(-eta)) : -std::log1p(std::exp(eta));
            total -= problem.weight_at(m, i) * (y * log_pi + (1.0 - y) * log_1mpi);
        }
    }
    return total;
}

FdGradient fd_gradient(const RegressionProblem& problem, const CoefficientSet& coeffs,
                       double step) {
    const int n = coeffs.n_neurons;
    FdGradient g;
    g.intercepts.assign(n, 0.0);
    g.betas.assign(static_cast<std::size_t>(n) * n, 0.0);
    CoefficientSet work = coeffs;
    for (int i = 0; i < n; ++i) {
        work.intercepts[i] = coeffs.intercepts[i] + step;
        const double up = direct_nll(problem, work);
        work.intercepts[i] = coeffs.intercepts[i] - step;
        const double down = direct_nll(problem, work);
        work.intercepts[i] = coeffs.intercepts[i];
        g.intercepts[i] = (up - down) / (2.0 * step);
    }
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s == t)
                continue;
            work.beta(s, t) = coeffs.beta(s, t) + step;
            const double up = direct_nll(problem, work);
            work.beta(s, t) = coeffs.beta(s, t) - step;
            const double down = direct_nll(problem, work);
            work.beta(s, t) = coeffs.beta(s, t);
            g.betas[static_cast<std::size_t>(s) * n + t] = (up - down) / (2.0 * step);
        }
    }
    return g;
}

namespace {

// Solves a x = b in place, partial pivoting. Small dense systems only.
std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
    const int d = static_cast<int>(b.size());
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14)
            throw std::runtime_error("newton oracle: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < d; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < d; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(d, 0.0);
    for (int r = d - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < d; ++c)
            s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

} // namespace

std::vector<double> newton_logistic(const RegressionProblem& problem, int target,
                                    int max_iter, double tol) {
    const int n = problem.n_neurons();
    const int d = n; // intercept + (n - 1) betas
    std::vector<double> theta(d, 0.0);

    // Row features: [1, x_j for each j != target].
    const int rows = problem.n_bins() - 1;
    std::vector<std::vector<double>> feat(rows, std::vector<double>(d, 0.0));
    std::vector<double> resp(rows), wt(rows);
    for (int m = 0; m < rows; ++m) {
        feat[m][0] = 1.0;
        int c = 1;
        for (int j = 0; j < n; ++j)
            if (j != target)
                feat[m][c++] = problem.x.at(m, j) ? 1.0 : 0.0;
        resp[m] = problem.y.at(m + 1, target) ? 1.0 : 0.0;
        wt[m] = problem.weight_at(m, target);
    }

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> grad(d, 0.0);
        std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
        for (int m = 0; m < rows; ++m) {
            double eta = 0.0;
            for (int c = 0; c < d; ++c)
                eta += theta[c] * feat[m][c];
            const double pi = 1.0 / (1.0 + std::exp(-eta));
            const double r = wt[m] * (pi - resp[m]);
            const double h = wt[m] * pi * (1.0 - pi);
            for (int c = 0; c < d; ++c) {
                grad[c] += r * feat[m][c];
                for (int c2 = 0; c2 < d; ++c2)
                    hess[c][c2] += h * feat[m][c] * feat[m][c2];
            }
        }
        double gnorm = 0.0;
        for (double gc : grad)
            gnorm = std::max(gnorm, std::abs(gc));
        if (gnorm < tol)
            break;
        auto delta = solve_dense(hess, grad);
        for (int c = 0; c < d; ++c)
            theta[c] -= delta[c];
    }
    return theta;
}

RegressionProblem random_problem(int n_neurons, int n_bins, std::uint64_t seed,
                                 WeightRule rule, double x_density, double y_density) {
    Rng rng(seed);
    BinaryProcessMatrix x;
    x.delta_ms = 1.0;
    x.n_bins = n_bins;
    x.n_neurons = n_neurons;
    x.kind = ProcessKind::spike;
    x.values.resize(static_cast<std::size_t>(n_bins) * n_neurons);
    BinaryProcessMatrix y = x;
    y.kind = ProcessKind::event;
    for (auto& v : x.values)
        v = rng.bernoulli(x_density) ? 1 : 0;
    for (auto& v : y.values)
        v = rng.bernoulli(y_density) ? 1 : 0;
    // Both classes must appear for the balance rule.
    y.values.front() = 0;
    y.values.back() = 1;
    return build_problem(x, y, rule);
}

CoefficientSet random_coeffs(int n_neurons, std::uint64_t seed, double scale) {
    Rng rng(seed);
    CoefficientSet c = CoefficientSet::zeros(n_neurons);
    for (int i = 0; i < n_neurons; ++i)
        c.intercepts[i] = rng.normal(0.0, scale);
    for (int s = 0; s < n_neurons; ++s)
        for (int t = 0; t < n_neurons; ++t)
            if (s != t)
                c.beta(s, t) = rng.normal(0.0, scale);
    return c;
}

VoltageTraces piecewise_linear_trace(
    double v0, const std::vector<std::pair<double, double>>& segments, double dt_ms) {
    VoltageTraces tr;
    tr.dt_record_ms = dt_ms;
    tr.n_neurons = 1;
    tr.values.push_back(v0);
    double v = v0;
    for (const auto& [slope, duration] : segments) {
        const int steps = static_cast<int>(std::lround(duration / dt_ms));
        for (int k = 0; k < steps; ++k) {
            v += slope * dt_ms;
            tr.values.push_back(v);
        }
    }
    return tr;
}

double ls_slope(const std::vector<double>& samples, int first, int count,
                double dt_ms) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < count; ++k) {
        const double xk = (first + k) * dt_ms;
        const double yk = samples[first + k];
        sx += xk;
        sy += yk;
        sxx += xk * xk;
        sxy += xk * yk;
    }
    const double nd = count;
    return (sxy - sx * sy / nd) / (sxx - sx * sx / nd);
}

double single_epsp_peak(const NeuronParams& neuron, const SynapseParams& synapse,
                        double weight, double fine_dt_ms, double horizon_ms) {
    double r = 0.0;
    double v = neuron.leak_reversal_mv;
    double peak = 0.0;
    const double g_ns = synapse.gmax_ps * 1e-3 * weight;
    for (double t = 0.0; t < horizon_ms; t += fine_dt_ms) {
        const double T = t < synapse.transmitter_pulse_duration_ms
                             ? synapse.transmitter_pulse_amplitude_mm
                             : 0.0;
        const double i_syn = g_ns * r * (synapse.reversal_potential_mv - v);
        const double i_leak =
            neuron.leak_conductance_ns * (neuron.leak_reversal_mv - v);
        const double dr =
            synapse.r1_per_ms_mm * T * (1.0 - r) - synapse.r2_per_ms * r;
        v += fine_dt_ms * (i_syn + i_leak) / neuron.membrane_capacitance_pf;
        r += fine_dt_ms * dr;
        peak = std::max(peak, v - neuron.leak_reversal_mv);
    }
    return peak;
}

} // namespace oracles
