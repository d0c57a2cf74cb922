// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace tvrec {

double pair_distance(const ProgramTraits& a, const ProgramTraits& b) {
    int same = 0;
    same += a.category == b.category ? 1 : 0;
    same += a.subcategory == b.subcategory ? 1 : 0;
    same += a.channel == b.channel ? 1 : 0;
    return 1.0 - static_cast<double>(same) / 3.0;
}

std::optional<double> ndcg_at_k(const std::vector<ProgramId>& list,
                                const std::set<ProgramId>& truth, int k) {
    if (truth.empty()) return std::nullopt;
    size_t depth = std::min<size_t>(list.size(), static_cast<size_t>(k));
    double dcg = 0;
    for (size_t pos = 0; pos < depth; ++pos) {
        if (truth.count(list[pos])) {
            dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
        }
    }
    double idcg = 0;
    size_t ideal = std::min<size_t>(truth.size(), static_cast<size_t>(k));
    for (size_t pos = 0; pos < ideal; ++pos) {
        idcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
    }
    return dcg / idcg;
}

double ild_at_k(const std::vector<ProgramTraits>& list, int k) {
    size_t depth = std::min<size_t>(list.size(), static_cast<size_t>(k));
    if (depth < 2) return 0.0;
    double sum = 0;
    size_t pairs = 0;
    for (size_t i = 0; i < depth; ++i) {
        for (size_t j = i + 1; j < depth; ++j) {
            sum += pair_distance(list[i], list[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

double msi_at_k(const std::vector<int>& audience, int k, int total_users) {
    size_t depth = std::min<size_t>(audience.size(), static_cast<size_t>(k));
    if (depth == 0) return 0.0;
    double log_n = std::log2(static_cast<double>(total_users));
    double sum = 0;
    for (size_t i = 0; i < depth; ++i) {
        double novelty;
        if (total_users <= 1) {
            novelty = audience[i] == 0 ? 1.0 : 0.0;
        } else if (audience[i] <= 0) {
            novelty = 1.0;  // watched by nobody: maximal surprise
        } else {
            novelty = std::log2(static_cast<double>(total_users) /
                                static_cast<double>(audience[i])) /
                      log_n;
        }
        sum += novelty;
    }
    return sum / static_cast<double>(depth);
}

double unexpectedness_at_k(const std::vector<ProgramTraits>& list,
                           const std::vector<ProgramTraits>& history, int k) {
    size_t depth = std::min<size_t>(list.size(), static_cast<size_t>(k));
    if (history.empty() || depth == 0) return 1.0;
    double sum = 0;
    for (size_t i = 0; i < depth; ++i) {
        for (const ProgramTraits& h : history) {
            sum += pair_distance(list[i], h);
        }
    }
    return sum / static_cast<double>(depth * history.size());
}

}  // namespace tvrec
