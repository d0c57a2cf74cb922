// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvrec/features.hpp"
#include "tvrec/ingestion.hpp"
#include "tvrec/text.hpp"

namespace tvrec {

struct ScoredEntry {
    ProgramId program = 0;
    double score = 0.0;
};

/// Total ranking over a candidate set: descending score, ties broken by
/// ascending program id, no duplicates. Truncation to k happens downstream.
struct ScoredList {
    std::vector<ScoredEntry> entries;
};

void sort_entries(std::vector<ScoredEntry>& entries);

/// Uniform random permutation scores in (0, 1], deterministic under seed.
ScoredList random_rank(const std::vector<Candidate>& candidates, std::uint64_t seed);

/// score = global view count over the stats window; same list for every user.
ScoredList popular_rank(const std::vector<Candidate>& candidates, const HistoryStats& stats);

/// score = the user's watch-seconds on the program over the stats window.
ScoredList user_popular_rank(UserId user, const std::vector<Candidate>& candidates,
                             const HistoryStats& stats);

// ---------------------------------------------------------------------------
// TF-IDF content-based scoring over four metadata fields.

enum class TextField { Title = 0, Description = 1, Actors = 2, Directors = 3 };
inline constexpr int kNumTextFields = 4;

class TfIdfIndex {
public:
    /// Term weight: tf * ln(1 + N / (1 + df)); vectors L2-normalized per field.
    static TfIdfIndex build(const Catalog& catalog, const StopwordSet& stopwords);

    /// Cosine between two programs' vectors for one field (0 if either is empty).
    double field_cosine(TextField field, ProgramId a, ProgramId b) const;

    /// Sum of the four per-field cosines.
    double similarity_sum(ProgramId a, ProgramId b) const;

    /// Mean of the normalized vectors of `history`, per field. Scoring a
    /// candidate against the profile equals the mean over history programs of
    /// the per-field cosine sums.
    struct Profile {
        // term id -> weight, sorted by term id
        std::array<std::vector<std::pair<int, double>>, kNumTextFields> fields;
        size_t history_size = 0;
    };
    Profile build_profile(const std::vector<ProgramId>& history) const;
    double score_profile(ProgramId candidate, const Profile& profile) const;

private:
    // term id -> weight, sorted; normalized.
    using SparseVec = std::vector<std::pair<int, double>>;
    std::array<std::unordered_map<ProgramId, SparseVec>, kNumTextFields> vectors_;
    const SparseVec* vector_of(TextField field, ProgramId p) const;
};

/// Mean over history programs of the summed per-field cosine similarity
/// ("average similarity of a content and all the programs previously seen").
/// Empty history -> 0. Invariant to history order.
double content_based_score(ProgramId candidate, const std::vector<ProgramId>& history,
                           const TfIdfIndex& index);

}  // namespace tvrec
