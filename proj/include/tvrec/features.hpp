// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvrec/domain.hpp"
#include "tvrec/ingestion.hpp"

namespace tvrec {

struct FeatureSchema {
    std::vector<std::string> names;  // unique, ordered
    size_t size() const { return names.size(); }
    int index_of(const std::string& name) const;  // -1 if absent
};

/// The fixed schema every dataset in a run shares.
const FeatureSchema& feature_schema();

/// Inclusive week range [first, last].
struct WeekRange {
    int first = 0;
    int last = 0;
    bool contains(int week) const { return week >= first && week <= last; }
    int length() const { return last - first + 1; }
};

/// Per-user counters over a stats window.
struct UserWindowStats {
    std::unordered_map<ProgramId, int> program_views;
    std::unordered_map<ProgramId, std::int64_t> program_watch_seconds;
    std::unordered_map<ProgramId, Timestamp> last_watch;
    std::unordered_map<ProgramId, int> days_watched;  // distinct UTC days
    std::unordered_map<ChannelId, std::int64_t> channel_watch_seconds;
    std::array<std::int64_t, kNumCategories> category_watch_seconds{};
    std::map<std::string, std::int64_t> subcategory_watch_seconds;
    std::array<std::int64_t, kNumDayParts> daypart_watch_seconds{};
    std::array<std::int64_t, 7 * kNumDayParts> weekday_daypart_watch_seconds{};
    std::int64_t total_watch_seconds = 0;
    // Distinct programs the user watched per the preference rule, with the
    // channel carrying most of that user's watch time; sorted by program id.
    std::vector<std::pair<ProgramId, ChannelId>> watched_programs;
    // Union of title tokens over watched_programs (for the Jaccard feature).
    std::set<std::string> watched_title_tokens;

    double channel_share(ChannelId c) const;
    double category_share(Category c) const;
    double subcategory_share(const std::string& s) const;
    double daypart_share(DayPart p) const;
};

/// Per-window counters computed strictly from events inside the window.
struct HistoryStats {
    WeekRange window;
    Timestamp window_start = 0;
    Timestamp window_end = 0;  // exclusive
    int total_users = 0;       // users with at least one event in window

    std::unordered_map<UserId, UserWindowStats> users;
    std::unordered_map<ProgramId, int> program_views;
    std::unordered_map<ProgramId, int> program_audience;  // distinct rule-positive users
    std::unordered_map<ProgramId, std::int64_t> program_watch_seconds;
    std::unordered_map<ProgramId, double> program_rank_quantile;  // [0,1], most watched ~ 1
    std::array<std::int64_t, kNumCategories> category_watch_seconds{};
    std::map<std::string, std::int64_t> subcategory_watch_seconds;
    std::int64_t total_watch_seconds = 0;

    const UserWindowStats* user(UserId u) const;
    int views_of(ProgramId p) const;
    int audience_of(ProgramId p) const;
    double rank_quantile_of(ProgramId p) const;
    double audience_share_of(ProgramId p) const;
    double category_share(Category c) const;
    double subcategory_share(const std::string& s) const;
};

/// Throws std::invalid_argument if the window is empty (last < first).
HistoryStats build_stats(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                         WeekRange window, const PreferenceRule& rule);

/// Full window plus the last-1-week and last-2-week sub-windows used by the
/// recency feature group.
struct StatsBundle {
    HistoryStats full;
    HistoryStats last1;
    HistoryStats last2;
};

StatsBundle build_stats_bundle(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                               WeekRange window, const PreferenceRule& rule);

/// A program offered to a user at some moment, tied to the airing that made
/// it available (the airing's channel is the program's channel for distance
/// and channel-share purposes).
struct Candidate {
    ProgramId program = 0;
    ChannelId channel = 0;
    Timestamp start = 0;
    Timestamp end = 0;
};

struct CfScores {
    double wrmf = 0.0;
    double sgd = 0.0;
};

/// Sorted unique title tokens per program, shared across extractions.
struct TitleTokenCache {
    std::unordered_map<ProgramId, std::vector<std::string>> tokens;
    static TitleTokenCache build(const Catalog& catalog);
};

/// Feature vector for a <user, candidate> pair at a context time.
/// `stats` must come from a window ending before the context's week.
/// `title_cache` is optional; without it the candidate title is tokenized
/// on the fly.
FeatureVector extract_features(UserId user, const Candidate& candidate, Timestamp context,
                               const StatsBundle& stats, const Catalog& catalog, double cb_score,
                               const CfScores& cf, const TitleTokenCache* title_cache = nullptr);

// ---------------------------------------------------------------------------
// FunkSVD-style SGD matrix factorization, used only as a feature signal.

struct SgdMfParams {
    int factors = 16;
    double learning_rate = 0.01;
    double reg = 0.02;
    int epochs = 20;
    std::uint64_t seed = 1;
};

struct BinaryPreference {
    UserId user = 0;
    ProgramId program = 0;
    double label = 0.0;  // {0,1}
};

class SgdMfModel {
public:
    static SgdMfModel fit(const std::vector<BinaryPreference>& prefs, const SgdMfParams& params);

    /// Dot product of factor rows; 0 for unknown users or items.
    double predict(UserId user, ProgramId program) const;

    int factors() const { return factors_; }

private:
    int factors_ = 0;
    std::unordered_map<UserId, int> user_index_;
    std::unordered_map<ProgramId, int> item_index_;
    std::vector<double> user_factors_;  // row-major
    std::vector<double> item_factors_;
};

}  // namespace tvrec
