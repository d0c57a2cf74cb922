// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvrec {

namespace {

double position_discount(size_t pos_1based) {
    return 1.0 / std::log2(static_cast<double>(pos_1based) + 1.0);
}

// Min-max normalized scores over the candidate set; all-equal scores map
// to gain 1 for every candidate (the accuracy term becomes constant).
std::vector<double> normalized_gains(const RerankContext& context) {
    double lo = context.model_scores[0], hi = context.model_scores[0];
    for (double s : context.model_scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::vector<double> gains(context.model_scores.size(), 1.0);
    if (hi > lo) {
        for (size_t i = 0; i < gains.size(); ++i) {
            gains[i] = (context.model_scores[i] - lo) / (hi - lo);
        }
    }
    return gains;
}

double accuracy_term(const std::vector<int>& list, const ObjectiveSpec& spec,
                     const RerankContext& context, const std::vector<double>& gains,
                     const std::vector<double>& ideal_prefix) {
    if (list.empty()) return 0.0;
    if (spec.accuracy_source == AccuracySource::ModelScore) {
        double dcg = 0;
        for (size_t p = 0; p < list.size(); ++p) {
            dcg += gains[static_cast<size_t>(list[p])] * position_discount(p + 1);
        }
        double ideal = ideal_prefix[std::min(list.size(), ideal_prefix.size() - 1)];
        return ideal > 0 ? dcg / ideal : 0.0;
    }
    if (!context.truth || context.truth->empty()) return 0.0;
    double dcg = 0;
    for (size_t p = 0; p < list.size(); ++p) {
        if (context.truth->count(context.ids[static_cast<size_t>(list[p])])) {
            dcg += position_discount(p + 1);
        }
    }
    double idcg = 0;
    size_t ideal = std::min(context.truth->size(), list.size());
    for (size_t p = 1; p <= ideal; ++p) idcg += position_discount(p);
    return idcg > 0 ? dcg / idcg : 0.0;
}

// Best achievable discounted gain sums for prefix lengths 0..n (ModelScore
// mode): gains sorted descending, accumulated with position discounts.
std::vector<double> ideal_gain_prefix(std::vector<double> gains) {
    std::sort(gains.begin(), gains.end(), std::greater<>());
    std::vector<double> prefix(gains.size() + 1, 0.0);
    for (size_t p = 0; p < gains.size(); ++p) {
        prefix[p + 1] = prefix[p] + gains[p] * position_discount(p + 1);
    }
    return prefix;
}

struct TermEval {
    std::vector<double> gains;
    std::vector<double> ideal_prefix;

    TermEval(const RerankContext& context)
        : gains(normalized_gains(context)), ideal_prefix(ideal_gain_prefix(gains)) {}

    double eval(const std::vector<int>& list, const ObjectiveSpec& spec,
                const RerankContext& context) const {
        double value = 0;
        if (spec.w_acc != 0) value += spec.w_acc * accuracy_term(list, spec, context, gains, ideal_prefix);
        if (spec.w_div != 0 || spec.w_nov != 0 || spec.w_ser != 0) {
            std::vector<ProgramTraits> traits;
            std::vector<int> audience;
            traits.reserve(list.size());
            audience.reserve(list.size());
            for (int idx : list) {
                traits.push_back(context.traits[static_cast<size_t>(idx)]);
                audience.push_back(context.audience[static_cast<size_t>(idx)]);
            }
            int k = static_cast<int>(list.size());
            if (spec.w_div != 0) value += spec.w_div * ild_at_k(traits, k);
            if (spec.w_nov != 0) value += spec.w_nov * msi_at_k(audience, k, context.total_users);
            if (spec.w_ser != 0) {
                value += spec.w_ser * unexpectedness_at_k(traits, context.user_history, k);
            }
        }
        return value;
    }
};

}  // namespace

double objective_eval(const std::vector<int>& list, const ObjectiveSpec& spec,
                      const RerankContext& context) {
    if (list.empty()) throw std::invalid_argument("objective_eval: empty list");
    return TermEval(context).eval(list, spec, context);
}

std::vector<int> greedy_rec(const ObjectiveSpec& spec, const RerankContext& context) {
    std::vector<int> list;
    const size_t n = context.size();
    if (n == 0 || spec.k < 1) return list;

    // Incremental state: appending candidate c at position m+1 changes each
    // term by a per-candidate amount, so a step costs O(n) instead of
    // re-evaluating the whole extended list per candidate.
    std::vector<double> gains = normalized_gains(context);
    std::vector<double> ideal_prefix = ideal_gain_prefix(gains);

    std::vector<double> novelty(n, 0.0);
    if (spec.w_nov != 0) {
        for (size_t c = 0; c < n; ++c) {
            novelty[c] = msi_at_k({context.audience[c]}, 1, context.total_users);
        }
    }
    std::vector<double> seren(n, 0.0);  // mean distance to the history
    bool history_empty = context.user_history.empty();
    if (spec.w_ser != 0 && !history_empty) {
        for (size_t c = 0; c < n; ++c) {
            double sum = 0;
            for (const ProgramTraits& h : context.user_history) {
                sum += pair_distance(context.traits[c], h);
            }
            seren[c] = sum / static_cast<double>(context.user_history.size());
        }
    }
    std::vector<double> cross(n, 0.0);  // sum of distances to the chosen list

    std::vector<bool> used(n, false);
    double dcg = 0, ild_pairs = 0, msi_sum = 0, seren_sum = 0;

    auto ground_truth_gain = [&](size_t c) {
        return context.truth && context.truth->count(context.ids[c]) ? 1.0 : 0.0;
    };
    double truth_idcg_all = 0;  // filled lazily per prefix in GroundTruth mode

    while (static_cast<int>(list.size()) < spec.k && list.size() < n) {
        size_t m = list.size();  // new item lands at position m+1
        double disc = position_discount(m + 1);

        double acc_denominator = 1;
        if (spec.w_acc != 0) {
            if (spec.accuracy_source == AccuracySource::ModelScore) {
                acc_denominator = ideal_prefix[std::min(m + 1, ideal_prefix.size() - 1)];
            } else {
                size_t truth_size = context.truth ? context.truth->size() : 0;
                truth_idcg_all = 0;
                size_t ideal = std::min(truth_size, m + 1);
                for (size_t p = 1; p <= ideal; ++p) truth_idcg_all += position_discount(p);
                acc_denominator = truth_idcg_all;
            }
        }

        int best = -1;
        double best_value = 0;
        for (size_t c = 0; c < n; ++c) {
            if (used[c]) continue;
            double value = 0;
            if (spec.w_acc != 0) {
                double gain = spec.accuracy_source == AccuracySource::ModelScore
                                  ? gains[c]
                                  : ground_truth_gain(c);
                value += spec.w_acc *
                         (acc_denominator > 0 ? (dcg + gain * disc) / acc_denominator : 0.0);
            }
            if (spec.w_div != 0 && m >= 1) {
                double pairs = static_cast<double>((m + 1) * m / 2);
                value += spec.w_div * (ild_pairs + cross[c]) / pairs;
            }
            if (spec.w_nov != 0) {
                value += spec.w_nov * (msi_sum + novelty[c]) / static_cast<double>(m + 1);
            }
            if (spec.w_ser != 0) {
                value += spec.w_ser * (history_empty
                                           ? 1.0
                                           : (seren_sum + seren[c]) / static_cast<double>(m + 1));
            }
            bool take;
            if (best < 0) {
                take = true;
            } else if (value != best_value) {
                take = value > best_value;
            } else {
                double sc = context.model_scores[c];
                double sb = context.model_scores[static_cast<size_t>(best)];
                take = sc != sb ? sc > sb : context.ids[c] < context.ids[static_cast<size_t>(best)];
            }
            if (take) {
                best = static_cast<int>(c);
                best_value = value;
            }
        }

        size_t picked = static_cast<size_t>(best);
        if (spec.w_acc != 0) {
            double gain = spec.accuracy_source == AccuracySource::ModelScore
                              ? gains[picked]
                              : ground_truth_gain(picked);
            dcg += gain * disc;
        }
        ild_pairs += cross[picked];
        msi_sum += novelty[picked];
        seren_sum += seren[picked];
        if (spec.w_div != 0) {
            for (size_t c = 0; c < n; ++c) {
                if (!used[c] && c != picked) {
                    cross[c] += pair_distance(context.traits[c], context.traits[picked]);
                }
            }
        }
        used[picked] = true;
        list.push_back(best);
    }
    return list;
}

double objective_of_averages(const ObjectiveSpec& spec, double ndcg, double ild, double msi,
                             double unexpectedness) {
    return spec.w_acc * ndcg + spec.w_div * ild + spec.w_nov * msi + spec.w_ser * unexpectedness;
}

}  // namespace tvrec
