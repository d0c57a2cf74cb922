// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/recommenders.hpp"

#include <algorithm>
#include <cmath>

#include "tvrec/rng.hpp"
#include "tvrec/text.hpp"

namespace tvrec {

void sort_entries(std::vector<ScoredEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.program < b.program;
    });
}

ScoredList random_rank(const std::vector<Candidate>& candidates, std::uint64_t seed) {
    std::vector<ProgramId> ids;
    ids.reserve(candidates.size());
    for (const Candidate& c : candidates) ids.push_back(c.program);
    std::sort(ids.begin(), ids.end());

    SplitMix64 rng(seed);
    for (size_t i = ids.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(ids[i - 1], ids[j]);
    }

    ScoredList list;
    list.entries.reserve(ids.size());
    double n = static_cast<double>(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        list.entries.push_back({ids[i], (n - static_cast<double>(i)) / n});
    }
    return list;
}

ScoredList popular_rank(const std::vector<Candidate>& candidates, const HistoryStats& stats) {
    ScoredList list;
    list.entries.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        list.entries.push_back({c.program, static_cast<double>(stats.views_of(c.program))});
    }
    sort_entries(list.entries);
    return list;
}

ScoredList user_popular_rank(UserId user, const std::vector<Candidate>& candidates,
                             const HistoryStats& stats) {
    const UserWindowStats* u = stats.user(user);
    ScoredList list;
    list.entries.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        double score = 0.0;
        if (u) {
            auto it = u->program_watch_seconds.find(c.program);
            if (it != u->program_watch_seconds.end()) score = static_cast<double>(it->second);
        }
        list.entries.push_back({c.program, score});
    }
    sort_entries(list.entries);
    return list;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> field_tokens(const Program& p, TextField field,
                                      const StopwordSet& stopwords) {
    switch (field) {
        case TextField::Title:
            return tokenize(p.title, stopwords);
        case TextField::Description:
            return tokenize(p.description, stopwords);
        case TextField::Actors: {
            std::vector<std::string> out;
            for (const auto& a : p.actors) {
                for (auto& t : tokenize(a, stopwords)) out.push_back(std::move(t));
            }
            return out;
        }
        case TextField::Directors: {
            std::vector<std::string> out;
            for (const auto& d : p.directors) {
                for (auto& t : tokenize(d, stopwords)) out.push_back(std::move(t));
            }
            return out;
        }
    }
    return {};
}

}  // namespace

TfIdfIndex TfIdfIndex::build(const Catalog& catalog, const StopwordSet& stopwords) {
    TfIdfIndex index;
    std::vector<ProgramId> ids = catalog.sorted_program_ids();
    double n_docs = static_cast<double>(ids.size());

    for (int field = 0; field < kNumTextFields; ++field) {
        // Vocabulary with deterministic term ids (sorted terms).
        std::map<std::string, int> df;
        std::vector<std::map<std::string, int>> doc_tf(ids.size());
        for (size_t d = 0; d < ids.size(); ++d) {
            const Program& p = catalog.programs.at(ids[d]);
            for (auto& t : field_tokens(p, static_cast<TextField>(field), stopwords)) {
                doc_tf[d][t] += 1;
            }
            for (const auto& [term, count] : doc_tf[d]) df[term] += 1;
        }
        std::map<std::string, int> term_id;
        int next_id = 0;
        for (const auto& [term, count] : df) term_id[term] = next_id++;

        for (size_t d = 0; d < ids.size(); ++d) {
            if (doc_tf[d].empty()) continue;
            SparseVec vec;
            vec.reserve(doc_tf[d].size());
            double norm_sq = 0;
            for (const auto& [term, tf] : doc_tf[d]) {
                double idf = std::log(1.0 + n_docs / (1.0 + static_cast<double>(df[term])));
                double w = static_cast<double>(tf) * idf;
                vec.emplace_back(term_id[term], w);
                norm_sq += w * w;
            }
            double norm = std::sqrt(norm_sq);
            if (norm > 0) {
                for (auto& [id, w] : vec) w /= norm;
            }
            std::sort(vec.begin(), vec.end());
            index.vectors_[static_cast<size_t>(field)].emplace(ids[d], std::move(vec));
        }
    }
    return index;
}

const TfIdfIndex::SparseVec* TfIdfIndex::vector_of(TextField field, ProgramId p) const {
    const auto& m = vectors_[static_cast<size_t>(field)];
    auto it = m.find(p);
    return it == m.end() ? nullptr : &it->second;
}

double TfIdfIndex::field_cosine(TextField field, ProgramId a, ProgramId b) const {
    const SparseVec* va = vector_of(field, a);
    const SparseVec* vb = vector_of(field, b);
    if (!va || !vb) return 0.0;
    double dot = 0;
    size_t i = 0, j = 0;
    while (i < va->size() && j < vb->size()) {
        if ((*va)[i].first < (*vb)[j].first) {
            ++i;
        } else if ((*va)[i].first > (*vb)[j].first) {
            ++j;
        } else {
            dot += (*va)[i].second * (*vb)[j].second;
            ++i;
            ++j;
        }
    }
    return dot;
}

double TfIdfIndex::similarity_sum(ProgramId a, ProgramId b) const {
    double sum = 0;
    for (int field = 0; field < kNumTextFields; ++field) {
        sum += field_cosine(static_cast<TextField>(field), a, b);
    }
    return sum;
}

TfIdfIndex::Profile TfIdfIndex::build_profile(const std::vector<ProgramId>& history) const {
    Profile profile;
    profile.history_size = history.size();
    if (history.empty()) return profile;
    // Sum in sorted-id order so float accumulation is deterministic.
    std::vector<ProgramId> sorted = history;
    std::sort(sorted.begin(), sorted.end());
    for (int field = 0; field < kNumTextFields; ++field) {
        std::map<int, double> acc;
        for (ProgramId p : sorted) {
            const SparseVec* v = vector_of(static_cast<TextField>(field), p);
            if (!v) continue;
            for (const auto& [term, w] : *v) acc[term] += w;
        }
        double scale = 1.0 / static_cast<double>(history.size());
        auto& flat = profile.fields[static_cast<size_t>(field)];
        flat.reserve(acc.size());
        for (const auto& [term, w] : acc) flat.emplace_back(term, w * scale);
    }
    return profile;
}

double TfIdfIndex::score_profile(ProgramId candidate, const Profile& profile) const {
    if (profile.history_size == 0) return 0.0;
    double sum = 0;
    for (int field = 0; field < kNumTextFields; ++field) {
        const SparseVec* v = vector_of(static_cast<TextField>(field), candidate);
        if (!v) continue;
        // Candidate vectors are short; binary-search the (much larger)
        // profile for each term.
        const auto& acc = profile.fields[static_cast<size_t>(field)];
        for (const auto& [term, w] : *v) {
            auto it = std::lower_bound(acc.begin(), acc.end(), term,
                                       [](const auto& entry, int t) { return entry.first < t; });
            if (it != acc.end() && it->first == term) sum += w * it->second;
        }
    }
    return sum;
}

double content_based_score(ProgramId candidate, const std::vector<ProgramId>& history,
                           const TfIdfIndex& index) {
    if (history.empty()) return 0.0;
    double sum = 0;
    for (ProgramId h : history) sum += index.similarity_sum(candidate, h);
    return sum / static_cast<double>(history.size());
}

}  // namespace tvrec
