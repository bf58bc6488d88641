#include "spikelasso/events.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikelasso/errors.hpp"

namespace spikelasso {

void EventDetectorParams::validate() const {
    if (!(right_deriv_threshold > 0.0))
        throw ParameterError("events: right derivative threshold must be > 0");
    if (!(deriv_jump_threshold > 0.0))
        throw ParameterError("events: derivative jump threshold must be > 0");
    if (!(left_deriv_threshold < 0.0))
        throw ParameterError("events: left derivative threshold must be < 0");
    if (!use_condition_i && !use_condition_ii && !use_condition_iii)
        throw ParameterError("events: at least one condition must be enabled");
    if (deriv_window < 2)
        throw ParameterError("events: deriv_window must be >= 2");
}

long BinaryProcessMatrix::count_ones() const {
    long total = 0;
    for (auto v : values)
        total += v;
    return total;
}

std::vector<Occurrence> detect_spikes(const VoltageTraces& tr, double threshold_mv,
                                      double lockout_ms) {
    std::vector<Occurrence> out;
    if (tr.spike_times) {
        for (int i = 0; i < tr.n_neurons; ++i)
            for (double t : (*tr.spike_times)[i])
                out.push_back({i, t});
        return out;
    }
    const int n_samples = tr.n_samples();
    for (int i = 0; i < tr.n_neurons; ++i) {
        double locked_until = -1.0;
        for (int k = 1; k < n_samples; ++k) {
            const double t = k * tr.dt_record_ms;
            if (t < locked_until)
                continue;
            if (tr.at(k - 1, i) < threshold_mv && tr.at(k, i) >= threshold_mv) {
                out.push_back({i, t});
                locked_until = t + lockout_ms;
            }
        }
    }
    return out;
}

namespace {

// Least-squares slope of w consecutive samples, as a fixed FIR filter:
// slope = sum_j (j - (w-1)/2) * v[j] / sum_j (j - (w-1)/2)^2, per sample.
std::vector<double> slope_filter(int w) {
    std::vector<double> a(w);
    const double mid = (w - 1) / 2.0;
    double denom = 0.0;
    for (int j = 0; j < w; ++j)
        denom += (j - mid) * (j - mid);
    for (int j = 0; j < w; ++j)
        a[j] = (j - mid) / denom;
    return a;
}

} // namespace

std::vector<std::uint8_t> qualifying_mask(const VoltageTraces& tr, int neuron,
                                          const EventDetectorParams& p) {
    p.validate();
    const int n = tr.n_samples();
    const int w = p.deriv_window;
    if (n < 2 * w + 1)
        throw ParameterError("events: trace needs at least " +
                             std::to_string(2 * w + 1) + " samples, got " +
                             std::to_string(n));
    if (neuron < 0 || neuron >= tr.n_neurons)
        throw DataError("events: neuron index out of range");

    const auto coeff = slope_filter(w);
    std::vector<std::uint8_t> mask(n, 0);
    // Left window is the w samples before k, right window the w after.
    for (int k = w; k + w < n; ++k) {
        double left = 0.0, right = 0.0;
        for (int j = 0; j < w; ++j) {
            left += coeff[j] * tr.at(k - w + j, neuron);
            right += coeff[j] * tr.at(k + 1 + j, neuron);
        }
        left /= tr.dt_record_ms;
        right /= tr.dt_record_ms;

        bool ok = true;
        if (p.use_condition_i && !(right >= p.right_deriv_threshold))
            ok = false;
        if (ok && p.use_condition_ii && !(right - left >= p.deriv_jump_threshold))
            ok = false;
        if (ok && p.use_condition_iii && !(left >= p.left_deriv_threshold))
            ok = false;
        mask[k] = ok ? 1 : 0;
    }
    return mask;
}

std::vector<Occurrence> detect_events(const VoltageTraces& tr,
                                      const EventDetectorParams& p) {
    std::vector<Occurrence> out;
    for (int i = 0; i < tr.n_neurons; ++i) {
        const auto mask = qualifying_mask(tr, i, p);
        for (std::size_t k = 0; k < mask.size(); ++k) {
            if (mask[k] && (k == 0 || !mask[k - 1]))
                out.push_back({i, static_cast<double>(k) * tr.dt_record_ms});
        }
    }
    return out;
}

namespace {

void bin_into(BinaryProcessMatrix& m, const std::vector<Occurrence>& occurrences,
              double duration_ms) {
    for (const auto& o : occurrences) {
        if (o.neuron < 0 || o.neuron >= m.n_neurons)
            throw DataError("bin_processes: neuron index " +
                            std::to_string(o.neuron) + " out of range");
        if (o.time_ms < 0.0 || o.time_ms > duration_ms)
            throw DataError("bin_processes: time " + std::to_string(o.time_ms) +
                            " ms outside [0, " + std::to_string(duration_ms) + "]");
        // Bin m covers (m*delta, (m+1)*delta]; t = 0 is clamped into bin 0.
        long bin = static_cast<long>(std::ceil(o.time_ms / m.delta_ms)) - 1;
        if (bin < 0)
            bin = 0;
        if (bin >= m.n_bins)
            continue; // past the last full bin (partial trailing interval)
        m.at(static_cast<int>(bin), o.neuron) = 1;
    }
}

} // namespace

std::pair<BinaryProcessMatrix, BinaryProcessMatrix>
bin_processes(const std::vector<Occurrence>& spikes,
              const std::vector<Occurrence>& events, int n_neurons,
              double duration_ms, double delta_ms) {
    if (!(delta_ms > 0.0))
        throw ParameterError("bin_processes: delta must be > 0");
    if (n_neurons < 1)
        throw ParameterError("bin_processes: n_neurons must be >= 1");
    const int n_bins =
        static_cast<int>(std::floor(duration_ms / delta_ms + 1e-9));

    BinaryProcessMatrix x;
    x.delta_ms = delta_ms;
    x.n_bins = n_bins;
    x.n_neurons = n_neurons;
    x.kind = ProcessKind::spike;
    x.values.assign(static_cast<std::size_t>(n_bins) * n_neurons, 0);
    BinaryProcessMatrix y = x;
    y.kind = ProcessKind::event;

    bin_into(x, spikes, duration_ms);
    bin_into(y, events, duration_ms);
    return {std::move(x), std::move(y)};
}

} // namespace spikelasso
