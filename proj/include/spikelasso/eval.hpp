#pragma once

#include <vector>

#include "spikelasso/graph.hpp"
#include "spikelasso/lasso.hpp"

namespace spikelasso {

/// Confusion counts at a ranking prefix. The candidate universe is all
/// n*(n-1) ordered non-self pairs; the four counts always sum to it.
struct Confusion {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct PpcPoint {
    long k = 0;
    double fraction = 0.0; // k / universe size
    double ppc = 0.0;      // (TP - FP) / (TP + FP)
};

struct EvalCurves {
    std::vector<RocPoint> roc;
    std::vector<PpcPoint> ppc;
    double auc = 0.0;
};

/// Validates a ranking against a node count: indices in range, no self
/// pairs, no duplicates, scores nonincreasing. Throws DataError.
void validate_ranking(const RankedEdgeList& ranked, int n_nodes);

/// Appends every universe pair missing from the ranking, in (source,
/// target) index order, with score -infinity.
RankedEdgeList pad_to_universe(const RankedEdgeList& ranked, int n_nodes);

/// Confusion counts for the top-k prefix of the ranking.
Confusion confusion_at_k(const RankedEdgeList& ranked, const DirectedGraph& truth,
                         long k);

/// Positive precision curve: for each prefix k = 1..len,
/// ppc = (TP - FP) / (TP + FP) with TP + FP = k.
std::vector<PpcPoint> ppc_curve(const RankedEdgeList& ranked,
                                const DirectedGraph& truth);

/// ROC sweep over k = 0..universe plus the trapezoid-rule AUC. The
/// ranking is padded to the full universe first. Throws
/// DegenerateDataError when the truth is empty or complete (rates
/// undefined).
EvalCurves roc_curve(const RankedEdgeList& ranked, const DirectedGraph& truth);

/// ROC, AUC and PPC (on the padded ranking) in one pass.
EvalCurves evaluate_ranking(const RankedEdgeList& ranked, const DirectedGraph& truth);

/// Number of reciprocal truth pairs fully present in the estimate,
/// paired with the total number of reciprocal truth pairs.
std::pair<int, int> bidirectional_recovery(const DirectedGraph& estimated,
                                           const DirectedGraph& truth);

/// Length of the initial prefix over which the PPC sits at its maximum
/// value (0 when the first point is already below the maximum).
long max_ppc_plateau_length(const std::vector<PpcPoint>& ppc);

} // namespace spikelasso
