// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvrec/domain.hpp"

namespace tvrec {

class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")" : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Catalog {
    std::unordered_map<ProgramId, Program> programs;
    std::vector<Airing> airings;  // sorted by (start, program, channel)
    std::set<ChannelId> channels;
    // Simulcast-merged id -> canonical id. Ids absent from the map are
    // their own canonical id.
    std::unordered_map<ProgramId, ProgramId> alias;
    std::int64_t max_airing_seconds = 0;

    ProgramId canonical(ProgramId id) const {
        auto it = alias.find(id);
        return it == alias.end() ? id : it->second;
    }
    const Program* find(ProgramId id) const {
        auto it = programs.find(canonical(id));
        return it == programs.end() ? nullptr : &it->second;
    }
    const Program& at(ProgramId id) const;
    std::vector<ProgramId> sorted_program_ids() const;
};

struct ViewLog {
    std::vector<ViewEvent> events;  // sorted by (user, watch_start, program)
    std::int64_t dropped_unknown_program = 0;
    std::int64_t dropped_outside_window = 0;
};

/// One labeled (user, program, week) record; feature vectors are attached
/// later when ranking datasets are built.
struct Interaction {
    UserId user = 0;
    ProgramId program = 0;
    int preference = 0;
    int week = 0;
};

/// EPG CSV header:
///   program_id,title,description,actors,directors,category,subcategory,
///   is_series,episode_count,duration_s,channel_id,start_utc,end_utc
/// actors/directors are |-separated, timestamps RFC 3339.
/// Throws FormatError (with the offending line number) on malformed rows.
Catalog parse_epg(const std::string& path);

/// Merges programs with identical title whose airings overlap >= 90% in
/// time (transitively). The lowest id of a group becomes canonical; its
/// twins' airings are rehomed under it and recorded in Catalog::alias.
/// Idempotent.
Catalog merge_simulcasts(Catalog catalog);

/// View log JSONL, one object per line:
///   {"user":u,"program":p,"channel":c,"watch_start":epoch_s,
///    "watched_s":n,"mode":"live"|"catchup"}
/// Program ids are remapped to canonical ids. Events with unresolvable
/// program ids or outside any airing's availability window are dropped and
/// counted, not fatal. Malformed JSON lines are fatal FormatErrors.
ViewLog parse_views(const std::string& path, const Catalog& catalog);

/// Week 0 starts at the first Monday 00:00 UTC at or before the first event.
WeekClock week_clock_for(const ViewLog& log);

/// One record per (user, program, week) that has at least one event.
/// watched_seconds accumulate per (user, program, UTC day) before the rule
/// is applied; a week is positive iff any of its days is.
std::vector<Interaction> build_interactions(const ViewLog& log, const Catalog& catalog,
                                            const PreferenceRule& rule, const WeekClock& clock);

}  // namespace tvrec
