// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvrec/domain.hpp"

namespace tvrec {

/// The facets of a program the pair-distance function compares. The channel
/// is the channel of the airing that put the program in the candidate set
/// (or, for history items, the channel it was watched on).
struct ProgramTraits {
    Category category = Category::News;
    std::string subcategory;
    ChannelId channel = 0;
};

/// d(i,j) = 1 - (cat(i,j) + subcat(i,j) + channel(i,j)) / 3 with {0,1}
/// indicators; value set {0, 1/3, 2/3, 1}.
double pair_distance(const ProgramTraits& a, const ProgramTraits& b);

/// Binary-relevance nDCG with discount 1/log2(pos+1). Normalization uses the
/// ideal DCG for |truth| positives at truncation k. Empty truth -> nullopt
/// (the session is excluded from averages, not scored 0).
std::optional<double> ndcg_at_k(const std::vector<ProgramId>& list,
                                const std::set<ProgramId>& truth, int k);

/// Mean pairwise distance over the top-k items; lists shorter than 2 -> 0.
double ild_at_k(const std::vector<ProgramTraits>& list, int k);

/// Mean self-information: mean over items of log2(N / max(1, audience)) /
/// log2(N); items watched by nobody count as novelty 1.
/// audience[i] is the audience count of list item i. N >= 1.
double msi_at_k(const std::vector<int>& audience, int k, int total_users);

/// Mean distance between list items and the user's watching history;
/// empty history -> 1 (everything is unexpected).
double unexpectedness_at_k(const std::vector<ProgramTraits>& list,
                           const std::vector<ProgramTraits>& history, int k);

}  // namespace tvrec
