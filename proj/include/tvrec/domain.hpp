// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tvrec/time_utils.hpp"

namespace tvrec {

// Opaque 64-bit identifiers assigned at ingestion; stable across modules.
using UserId = std::int64_t;
using ProgramId = std::int64_t;
using ChannelId = std::int64_t;

enum class Category {
    News = 0,
    TVSeries,
    Entertainment,
    Kids,
    Documentaries,
    Sports,
    Movies,
    Adults,
};
inline constexpr int kNumCategories = 8;

const char* to_string(Category c);

/// Throws std::invalid_argument for anything outside the eight categories.
Category category_from_string(std::string_view s);
bool try_category_from_string(std::string_view s, Category& out);

struct Program {
    ProgramId id = 0;
    std::string title;
    std::string description;
    std::vector<std::string> actors;
    std::vector<std::string> directors;
    Category category = Category::News;
    std::string subcategory;
    bool is_series = false;
    int episode_count = 0;       // 0 iff !is_series
    std::int64_t duration_s = 0; // > 0
    Timestamp first_broadcast = 0;
};

/// How long after its broadcast start a program stays available on catch-up.
inline constexpr std::int64_t kCatchupWindowSeconds = 7 * kSecondsPerDay;

struct Airing {
    ProgramId program = 0;
    ChannelId channel = 0;
    Timestamp start = 0;
    Timestamp end = 0;  // > start
};

enum class ViewMode { Live, CatchUp };

struct ViewEvent {
    UserId user = 0;
    ProgramId program = 0;
    ChannelId channel = 0;
    Timestamp watch_start = 0;
    std::int64_t watched_seconds = 0;  // >= 0
    ViewMode mode = ViewMode::Live;
};

struct FeatureVector {
    std::vector<double> values;
};

/// The L2R record <user, program, preference, features>.
struct Quadruple {
    UserId user = 0;
    ProgramId program = 0;
    int preference = 0;  // {0, 1}
    FeatureVector features;
};

/// Implicit-feedback labeling rule. Thresholds are strict: "more than 50%",
/// "more than 10 minutes".
struct PreferenceRule {
    enum class Kind { FractionOver, MinutesOver };
    Kind kind = Kind::FractionOver;
    double threshold = 0.5;  // fraction in [0,1], or minutes

    static PreferenceRule fraction_over(double fraction = 0.5) {
        return {Kind::FractionOver, fraction};
    }
    static PreferenceRule minutes_over(double minutes = 10.0) {
        return {Kind::MinutesOver, minutes};
    }
};

/// Fraction of the program the event covered, clamped to 1 (rewatches and
/// recording overlap can exceed the nominal duration).
/// Throws std::invalid_argument if the event does not reference `program`.
double watch_fraction(const ViewEvent& event, const Program& program);

int preference_label(double fraction, std::int64_t watched_seconds, const PreferenceRule& rule);

}  // namespace tvrec
