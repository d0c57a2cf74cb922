// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <set>
#include <vector>

#include "tvrec/metrics.hpp"

namespace tvrec {

enum class AccuracySource {
    ModelScore,   // min-max normalized model scores as relevance gains
    GroundTruth,  // binary judgments (offline Obj reporting only)
};

struct ObjectiveSpec {
    double w_acc = 0.5;
    double w_div = 0.25;
    double w_nov = 0.25;
    double w_ser = 0.0;
    int k = 10;
    AccuracySource accuracy_source = AccuracySource::ModelScore;
};

/// Everything the objective terms need, aligned by candidate index.
struct RerankContext {
    std::vector<ProgramId> ids;
    std::vector<ProgramTraits> traits;
    std::vector<double> model_scores;
    std::vector<int> audience;
    int total_users = 1;
    std::vector<ProgramTraits> user_history;
    const std::set<ProgramId>* truth = nullptr;  // GroundTruth mode only

    size_t size() const { return ids.size(); }
};

/// w_acc * accuracy(L) + w_div * ILD(L) + w_nov * MSI(L) + w_ser * Unexp(L).
/// In ModelScore mode the accuracy term is a DCG over min-max normalized
/// scores, normalized by the best achievable DCG for |L| items from this
/// candidate set, so it stays in [0,1] before ground truth exists.
/// `list` holds candidate indices in recommendation order.
double objective_eval(const std::vector<int>& list, const ObjectiveSpec& spec,
                      const RerankContext& context);

/// GreedyRec: grow the list by repeatedly appending the candidate that
/// maximizes the objective of the extended list; stop at k items or when
/// candidates run out. Argmax ties prefer the higher model score, then the
/// lower program id. Returns candidate indices in pick order.
std::vector<int> greedy_rec(const ObjectiveSpec& spec, const RerankContext& context);

/// The report-level objective: the same weighted combination applied to
/// already-averaged metric columns (the paper's "Global" column arithmetic).
double objective_of_averages(const ObjectiveSpec& spec, double ndcg, double ild, double msi,
                             double unexpectedness);

}  // namespace tvrec
