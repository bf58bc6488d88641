#include "spikelasso/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "spikelasso/errors.hpp"

namespace spikelasso {

void validate_ranking(const RankedEdgeList& ranked, int n_nodes) {
    std::set<std::pair<int, int>> seen;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : ranked.edges) {
        if (e.source < 0 || e.source >= n_nodes || e.target < 0 ||
            e.target >= n_nodes || e.source == e.target)
            throw DataError("ranking: pair (" + std::to_string(e.source) + "," +
                            std::to_string(e.target) + ") outside the universe");
        if (!seen.insert({e.source, e.target}).second)
            throw DataError("ranking: duplicate pair (" + std::to_string(e.source) +
                            "," + std::to_string(e.target) + ")");
        if (e.score > prev)
            throw DataError("ranking: scores increase at pair (" +
                            std::to_string(e.source) + "," +
                            std::to_string(e.target) + ")");
        prev = e.score;
    }
}

RankedEdgeList pad_to_universe(const RankedEdgeList& ranked, int n_nodes) {
    validate_ranking(ranked, n_nodes);
    std::set<std::pair<int, int>> present;
    for (const auto& e : ranked.edges)
        present.insert({e.source, e.target});
    RankedEdgeList out = ranked;
    for (int s = 0; s < n_nodes; ++s)
        for (int t = 0; t < n_nodes; ++t)
            if (s != t && !present.count({s, t}))
                out.edges.push_back({s, t, -std::numeric_limits<double>::infinity()});
    return out;
}

namespace {

long universe_size(int n_nodes) {
    return static_cast<long>(n_nodes) * (n_nodes - 1);
}

} // namespace

Confusion confusion_at_k(const RankedEdgeList& ranked, const DirectedGraph& truth,
                         long k) {
    truth.validate();
    validate_ranking(ranked, truth.n_nodes);
    if (k < 0 || k > static_cast<long>(ranked.edges.size()))
        throw ParameterError("confusion_at_k: k outside [0, ranking length]");

    const long universe = universe_size(truth.n_nodes);
    Confusion c;
    for (long r = 0; r < k; ++r) {
        const auto& e = ranked.edges[r];
        if (truth.has_edge(e.source, e.target))
            ++c.tp;
    }
    c.fp = k - c.tp;
    c.fn = static_cast<long>(truth.n_edges()) - c.tp;
    c.tn = universe - k - c.fn;
    return c;
}

std::vector<PpcPoint> ppc_curve(const RankedEdgeList& ranked,
                                const DirectedGraph& truth) {
    truth.validate();
    validate_ranking(ranked, truth.n_nodes);
    if (ranked.edges.empty())
        throw DataError("ppc_curve: empty ranking");

    const long universe = universe_size(truth.n_nodes);
    std::vector<PpcPoint> out;
    out.reserve(ranked.edges.size());
    long tp = 0;
    for (std::size_t r = 0; r < ranked.edges.size(); ++r) {
        const auto& e = ranked.edges[r];
        if (truth.has_edge(e.source, e.target))
            ++tp;
        const long k = static_cast<long>(r) + 1;
        const long fp = k - tp;
        out.push_back({k, static_cast<double>(k) / static_cast<double>(universe),
                       static_cast<double>(tp - fp) / static_cast<double>(k)});
    }
    return out;
}

EvalCurves roc_curve(const RankedEdgeList& ranked, const DirectedGraph& truth) {
    truth.validate();
    const long universe = universe_size(truth.n_nodes);
    const long positives = static_cast<long>(truth.n_edges());
    const long negatives = universe - positives;
    if (positives == 0 || negatives == 0)
        throw DegenerateDataError(
            "roc_curve: truth is empty or complete, rates are undefined");

    RankedEdgeList full = pad_to_universe(ranked, truth.n_nodes);

    EvalCurves curves;
    curves.roc.reserve(universe + 1);
    curves.roc.push_back({0.0, 0.0});
    long tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    for (long r = 0; r < universe; ++r) {
        const auto& e = full.edges[r];
        if (truth.has_edge(e.source, e.target))
            ++tp;
        else
            ++fp;
        const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
        const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
        curves.roc.push_back({fpr, tpr});
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curves.auc = auc;
    return curves;
}

EvalCurves evaluate_ranking(const RankedEdgeList& ranked, const DirectedGraph& truth) {
    EvalCurves curves = roc_curve(ranked, truth);
    curves.ppc = ppc_curve(pad_to_universe(ranked, truth.n_nodes), truth);
    return curves;
}

std::pair<int, int> bidirectional_recovery(const DirectedGraph& estimated,
                                           const DirectedGraph& truth) {
    estimated.validate();
    truth.validate();
    if (estimated.n_nodes != truth.n_nodes)
        throw DataError("bidirectional_recovery: node counts differ");
    int total = 0, recovered = 0;
    for (const auto& [s, t] : truth.edges) {
        if (s < t && truth.has_edge(t, s)) {
            ++total;
            if (estimated.has_edge(s, t) && estimated.has_edge(t, s))
                ++recovered;
        }
    }
    return {recovered, total};
}

long max_ppc_plateau_length(const std::vector<PpcPoint>& ppc) {
    if (ppc.empty())
        return 0;
    double max_ppc = ppc.front().ppc;
    for (const auto& p : ppc)
        max_ppc = std::max(max_ppc, p.ppc);
    long length = 0;
    for (const auto& p : ppc) {
        if (p.ppc == max_ppc)
            ++length;
        else
            break;
    }
    return length;
}

} // namespace spikelasso
