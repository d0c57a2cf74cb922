// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace tvrec {

namespace {

// RFC-4180-ish: fields may be double-quoted, "" escapes a quote.
std::vector<std::string> split_csv_row(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw FormatError("unterminated quote in CSV row", line_no);
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '|') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::int64_t parse_int(const std::string& s, const char* what, int line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError(std::string("invalid ") + what + ": '" + s + "'", line_no);
    }
    return v;
}

bool parse_bool(const std::string& s, const char* what, int line_no) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw FormatError(std::string("invalid ") + what + ": '" + s + "'", line_no);
}

constexpr const char* kEpgColumns[] = {
    "program_id", "title",         "description", "actors",     "directors",
    "category",   "subcategory",   "is_series",   "episode_count",
    "duration_s", "channel_id",    "start_utc",   "end_utc",
};
constexpr int kNumEpgColumns = 13;

void sort_airings(std::vector<Airing>& airings) {
    std::sort(airings.begin(), airings.end(), [](const Airing& a, const Airing& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.program != b.program) return a.program < b.program;
        return a.channel < b.channel;
    });
}

void refresh_catalog_caches(Catalog& catalog) {
    sort_airings(catalog.airings);
    catalog.max_airing_seconds = 0;
    for (const Airing& a : catalog.airings) {
        catalog.max_airing_seconds = std::max(catalog.max_airing_seconds, a.end - a.start);
        auto it = catalog.programs.find(a.program);
        if (it != catalog.programs.end()) {
            if (it->second.first_broadcast == 0 || a.start < it->second.first_broadcast) {
                it->second.first_broadcast = a.start;
            }
        }
    }
}

}  // namespace

const Program& Catalog::at(ProgramId id) const {
    const Program* p = find(id);
    if (!p) throw std::out_of_range("unknown program id " + std::to_string(id));
    return *p;
}

std::vector<ProgramId> Catalog::sorted_program_ids() const {
    std::vector<ProgramId> ids;
    ids.reserve(programs.size());
    for (const auto& [id, _] : programs) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Catalog parse_epg(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open EPG file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError("EPG file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_row(line, 1);
    int column_index[kNumEpgColumns];
    for (int c = 0; c < kNumEpgColumns; ++c) {
        auto it = std::find(header.begin(), header.end(), kEpgColumns[c]);
        if (it == header.end()) {
            throw FormatError(std::string("missing required column '") + kEpgColumns[c] + "'", 1);
        }
        column_index[c] = static_cast<int>(it - header.begin());
    }

    Catalog catalog;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> row = split_csv_row(line, line_no);
        if (row.size() != header.size()) {
            throw FormatError("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(row.size()),
                              line_no);
        }
        auto field = [&](int c) -> const std::string& {
            return row[static_cast<size_t>(column_index[c])];
        };

        Program p;
        p.id = parse_int(field(0), "program_id", line_no);
        p.title = field(1);
        p.description = field(2);
        p.actors = split_list(field(3));
        p.directors = split_list(field(4));
        if (!try_category_from_string(field(5), p.category)) {
            throw FormatError("unknown category literal '" + field(5) + "'", line_no);
        }
        p.subcategory = field(6);
        p.is_series = parse_bool(field(7), "is_series", line_no);
        p.episode_count = static_cast<int>(parse_int(field(8), "episode_count", line_no));
        if (p.episode_count < 0) throw FormatError("negative episode_count", line_no);
        if ((p.episode_count == 0) == p.is_series) {
            throw FormatError("episode_count must be 0 iff is_series is false", line_no);
        }
        p.duration_s = parse_int(field(9), "duration_s", line_no);
        if (p.duration_s <= 0) throw FormatError("duration_s must be positive", line_no);

        Airing a;
        a.program = p.id;
        a.channel = parse_int(field(10), "channel_id", line_no);
        try {
            a.start = parse_rfc3339(field(11));
            a.end = parse_rfc3339(field(12));
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), line_no);
        }
        if (a.end <= a.start) throw FormatError("airing end must be after start", line_no);

        catalog.programs.emplace(p.id, std::move(p));  // first row wins on metadata
        catalog.airings.push_back(a);
        catalog.channels.insert(a.channel);
    }
    refresh_catalog_caches(catalog);
    return catalog;
}

namespace {

struct UnionFind {
    std::map<ProgramId, ProgramId> parent;
    ProgramId find(ProgramId x) {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        ProgramId root = find(it->second);
        it->second = root;
        return root;
    }
    void unite(ProgramId a, ProgramId b) {
        ProgramId ra = find(a), rb = find(b);
        if (ra == rb) return;
        // Lowest id wins as canonical.
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
        parent.try_emplace(ra, ra);
    }
};

bool intervals_overlap_90(const Airing& a, const Airing& b) {
    std::int64_t inter = std::min(a.end, b.end) - std::max(a.start, b.start);
    if (inter <= 0) return false;
    std::int64_t longest = std::max(a.end - a.start, b.end - b.start);
    return static_cast<double>(inter) >= 0.9 * static_cast<double>(longest);
}

}  // namespace

Catalog merge_simulcasts(Catalog catalog) {
    // Bucket programs by exact title; only same-title pairs can merge.
    std::map<std::string, std::vector<ProgramId>> by_title;
    for (ProgramId id : catalog.sorted_program_ids()) {
        by_title[catalog.programs.at(id).title].push_back(id);
    }

    std::unordered_map<ProgramId, std::vector<const Airing*>> airings_of;
    for (const Airing& a : catalog.airings) airings_of[a.program].push_back(&a);

    UnionFind groups;
    for (const auto& [title, ids] : by_title) {
        if (ids.size() < 2) continue;
        for (size_t i = 0; i < ids.size(); ++i) {
            for (size_t j = i + 1; j < ids.size(); ++j) {
                const auto& ai = airings_of[ids[i]];
                const auto& aj = airings_of[ids[j]];
                bool overlap = false;
                for (const Airing* x : ai) {
                    for (const Airing* y : aj) {
                        if (intervals_overlap_90(*x, *y)) {
                            overlap = true;
                            break;
                        }
                    }
                    if (overlap) break;
                }
                if (overlap) groups.unite(ids[i], ids[j]);
            }
        }
    }

    Catalog merged;
    merged.channels = catalog.channels;
    merged.alias = catalog.alias;  // keep prior merges (idempotence)
    for (auto& [id, program] : catalog.programs) {
        ProgramId canon = groups.find(id);
        if (canon == id) {
            merged.programs.emplace(id, std::move(program));
        } else {
            merged.alias[id] = canon;
        }
    }
    // Re-point aliases of aliases at the final canonical id.
    for (auto& [from, to] : merged.alias) {
        ProgramId canon = groups.find(to);
        to = canon;
    }
    merged.airings.reserve(catalog.airings.size());
    for (Airing a : catalog.airings) {
        a.program = merged.canonical(a.program);
        merged.airings.push_back(a);
    }
    refresh_catalog_caches(merged);
    return merged;
}

ViewLog parse_views(const std::string& path, const Catalog& catalog) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open view log: " + path);

    // Airing lookup per program for the availability check.
    std::unordered_map<ProgramId, std::vector<const Airing*>> airings_of;
    for (const Airing& a : catalog.airings) airings_of[a.program].push_back(&a);

    ViewLog log;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        ViewEvent ev;
        try {
            ev.user = j.at("user").get<std::int64_t>();
            ev.program = j.at("program").get<std::int64_t>();
            ev.channel = j.at("channel").get<std::int64_t>();
            ev.watch_start = j.at("watch_start").get<std::int64_t>();
            ev.watched_seconds = j.at("watched_s").get<std::int64_t>();
            std::string mode = j.at("mode").get<std::string>();
            if (mode == "live") {
                ev.mode = ViewMode::Live;
            } else if (mode == "catchup") {
                ev.mode = ViewMode::CatchUp;
            } else {
                throw FormatError("mode must be 'live' or 'catchup'", line_no);
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("bad view record: ") + e.what(), line_no);
        }
        if (ev.watched_seconds < 0) throw FormatError("watched_s must be >= 0", line_no);

        ProgramId canon = catalog.canonical(ev.program);
        auto it = airings_of.find(canon);
        if (it == airings_of.end() || catalog.programs.find(canon) == catalog.programs.end()) {
            ++log.dropped_unknown_program;
            continue;
        }
        ev.program = canon;

        bool available = false;
        for (const Airing* a : it->second) {
            if (ev.mode == ViewMode::Live) {
                if (ev.watch_start >= a->start && ev.watch_start < a->end) {
                    available = true;
                    break;
                }
            } else {
                if (ev.watch_start >= a->start &&
                    ev.watch_start <= a->start + kCatchupWindowSeconds) {
                    available = true;
                    break;
                }
            }
        }
        if (!available) {
            ++log.dropped_outside_window;
            continue;
        }
        log.events.push_back(ev);
    }

    std::sort(log.events.begin(), log.events.end(), [](const ViewEvent& a, const ViewEvent& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.watch_start != b.watch_start) return a.watch_start < b.watch_start;
        return a.program < b.program;
    });
    return log;
}

WeekClock week_clock_for(const ViewLog& log) {
    if (log.events.empty()) return WeekClock{0};
    Timestamp first = log.events.front().watch_start;
    for (const ViewEvent& ev : log.events) first = std::min(first, ev.watch_start);
    return WeekClock::starting_monday_before(first);
}

std::vector<Interaction> build_interactions(const ViewLog& log, const Catalog& catalog,
                                            const PreferenceRule& rule, const WeekClock& clock) {
    // (user, program, day) -> summed watched seconds.
    std::map<std::tuple<UserId, ProgramId, std::int64_t>, std::int64_t> day_watch;
    for (const ViewEvent& ev : log.events) {
        day_watch[{ev.user, ev.program, day_of(ev.watch_start)}] += ev.watched_seconds;
    }

    std::map<std::tuple<UserId, ProgramId, int>, int> week_pref;
    for (const auto& [key, seconds] : day_watch) {
        const auto& [user, program, day] = key;
        const Program& prog = catalog.at(program);
        double fraction =
            std::min(1.0, static_cast<double>(seconds) / static_cast<double>(prog.duration_s));
        int label = preference_label(fraction, seconds, rule);
        int week = clock.week_of(day * kSecondsPerDay);
        auto [it, inserted] = week_pref.try_emplace({user, program, week}, label);
        if (!inserted) it->second = std::max(it->second, label);
    }

    std::vector<Interaction> out;
    out.reserve(week_pref.size());
    for (const auto& [key, pref] : week_pref) {
        const auto& [user, program, week] = key;
        out.push_back({user, program, pref, week});
    }
    return out;
}

}  // namespace tvrec
