// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tvrec/rng.hpp"
#include "tvrec/text.hpp"

namespace tvrec {

int FeatureSchema::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

namespace {

FeatureSchema make_schema() {
    FeatureSchema s;
    s.names = {
        // repetition
        "user_prog_views",
        "user_prog_watch_share",
        "user_channel_share",
        "prog_rank_quantile",
        "prog_audience_share",
        "series_episodes_watched",
        "series_episodes_remaining",
        // category
        "user_category_share",
        "user_subcategory_share",
        "global_category_share",
        "global_subcategory_share",
        // time
        "weekend_broadcast",
        "daypart_morning",
        "daypart_afternoon",
        "daypart_evening",
        "daypart_night",
        "user_daypart_share",
        "hours_since_broadcast",
        "days_since_last_watch",
        // text
        "title_jaccard",
        "tfidf_cb_score",
        // characteristics
        "is_series",
        "episode_count",
        "prog_age_days",
        "duration_hours",
        // collaborative
        "wrmf_score",
        "sgdmf_score",
        // recency: repetition/category shares on 1- and 2-week sub-windows
        "user_prog_views_1w",
        "user_prog_watch_share_1w",
        "user_channel_share_1w",
        "user_category_share_1w",
        "user_subcategory_share_1w",
        "user_prog_views_2w",
        "user_prog_watch_share_2w",
        "user_channel_share_2w",
        "user_category_share_2w",
        "user_subcategory_share_2w",
        // presence indicators for statistics that can be missing
        "has_user_history",
        "has_prog_history",
        "has_watched_before",
        "has_prev_broadcast",
        "has_user_history_1w",
        "has_user_history_2w",
    };
    return s;
}

}  // namespace

const FeatureSchema& feature_schema() {
    static const FeatureSchema schema = make_schema();
    return schema;
}

double UserWindowStats::channel_share(ChannelId c) const {
    if (total_watch_seconds <= 0) return 0.0;
    auto it = channel_watch_seconds.find(c);
    if (it == channel_watch_seconds.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_watch_seconds);
}

double UserWindowStats::category_share(Category c) const {
    if (total_watch_seconds <= 0) return 0.0;
    return static_cast<double>(category_watch_seconds[static_cast<int>(c)]) /
           static_cast<double>(total_watch_seconds);
}

double UserWindowStats::subcategory_share(const std::string& s) const {
    if (total_watch_seconds <= 0) return 0.0;
    auto it = subcategory_watch_seconds.find(s);
    if (it == subcategory_watch_seconds.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_watch_seconds);
}

double UserWindowStats::daypart_share(DayPart p) const {
    if (total_watch_seconds <= 0) return 0.0;
    return static_cast<double>(daypart_watch_seconds[static_cast<int>(p)]) /
           static_cast<double>(total_watch_seconds);
}

const UserWindowStats* HistoryStats::user(UserId u) const {
    auto it = users.find(u);
    return it == users.end() ? nullptr : &it->second;
}

int HistoryStats::views_of(ProgramId p) const {
    auto it = program_views.find(p);
    return it == program_views.end() ? 0 : it->second;
}

int HistoryStats::audience_of(ProgramId p) const {
    auto it = program_audience.find(p);
    return it == program_audience.end() ? 0 : it->second;
}

double HistoryStats::rank_quantile_of(ProgramId p) const {
    auto it = program_rank_quantile.find(p);
    return it == program_rank_quantile.end() ? 0.0 : it->second;
}

double HistoryStats::audience_share_of(ProgramId p) const {
    if (total_users <= 0) return 0.0;
    return static_cast<double>(audience_of(p)) / static_cast<double>(total_users);
}

double HistoryStats::category_share(Category c) const {
    if (total_watch_seconds <= 0) return 0.0;
    return static_cast<double>(category_watch_seconds[static_cast<int>(c)]) /
           static_cast<double>(total_watch_seconds);
}

double HistoryStats::subcategory_share(const std::string& s) const {
    if (total_watch_seconds <= 0) return 0.0;
    auto it = subcategory_watch_seconds.find(s);
    if (it == subcategory_watch_seconds.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_watch_seconds);
}

HistoryStats build_stats(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                         WeekRange window, const PreferenceRule& rule) {
    if (window.last < window.first) {
        throw std::invalid_argument("empty stats window");
    }
    HistoryStats stats;
    stats.window = window;
    stats.window_start = clock.week_start(window.first);
    stats.window_end = clock.week_start(window.last + 1);

    // (user, program, day) watch sums for the rule-positive audience and
    // the per-user watched-program history.
    std::map<std::tuple<UserId, ProgramId, std::int64_t>, std::int64_t> day_watch;
    // (user, program) -> per-channel seconds, for the dominant channel.
    std::map<std::pair<UserId, ProgramId>, std::map<ChannelId, std::int64_t>> channel_of_watch;

    for (const ViewEvent& ev : log.events) {
        int week = clock.week_of(ev.watch_start);
        if (!window.contains(week)) continue;
        const Program& prog = catalog.at(ev.program);

        UserWindowStats& u = stats.users[ev.user];
        u.program_views[ev.program] += 1;
        u.program_watch_seconds[ev.program] += ev.watched_seconds;
        auto [lw, inserted] = u.last_watch.try_emplace(ev.program, ev.watch_start);
        if (!inserted) lw->second = std::max(lw->second, ev.watch_start);
        u.channel_watch_seconds[ev.channel] += ev.watched_seconds;
        u.category_watch_seconds[static_cast<int>(prog.category)] += ev.watched_seconds;
        u.subcategory_watch_seconds[prog.subcategory] += ev.watched_seconds;
        int dp = static_cast<int>(daypart_of(ev.watch_start));
        u.daypart_watch_seconds[static_cast<size_t>(dp)] += ev.watched_seconds;
        u.weekday_daypart_watch_seconds[static_cast<size_t>(utc_weekday(ev.watch_start) * kNumDayParts + dp)] +=
            ev.watched_seconds;
        u.total_watch_seconds += ev.watched_seconds;

        stats.program_views[ev.program] += 1;
        stats.program_watch_seconds[ev.program] += ev.watched_seconds;
        stats.category_watch_seconds[static_cast<int>(prog.category)] += ev.watched_seconds;
        stats.subcategory_watch_seconds[prog.subcategory] += ev.watched_seconds;
        stats.total_watch_seconds += ev.watched_seconds;

        day_watch[{ev.user, ev.program, day_of(ev.watch_start)}] += ev.watched_seconds;
        channel_of_watch[{ev.user, ev.program}][ev.channel] += ev.watched_seconds;
    }
    stats.total_users = static_cast<int>(stats.users.size());

    // Distinct days watched per (user, program) and the rule-positive sets.
    std::set<std::pair<UserId, ProgramId>> rule_positive;
    for (const auto& [key, seconds] : day_watch) {
        const auto& [user, program, day] = key;
        stats.users[user].days_watched[program] += 1;
        const Program& prog = catalog.at(program);
        double fraction =
            std::min(1.0, static_cast<double>(seconds) / static_cast<double>(prog.duration_s));
        if (preference_label(fraction, seconds, rule) == 1) {
            rule_positive.insert({user, program});
        }
    }
    std::map<ProgramId, int> audience;
    for (const auto& [user, program] : rule_positive) audience[program] += 1;
    for (const auto& [program, count] : audience) stats.program_audience[program] = count;

    for (const auto& [user, program] : rule_positive) {
        const auto& channels = channel_of_watch[{user, program}];
        ChannelId best = channels.begin()->first;
        std::int64_t best_seconds = channels.begin()->second;
        for (const auto& [ch, sec] : channels) {
            if (sec > best_seconds) {
                best = ch;
                best_seconds = sec;
            }
        }
        UserWindowStats& u = stats.users[user];
        u.watched_programs.emplace_back(program, best);
        for (auto& t : tokenize(catalog.at(program).title, default_stopwords())) {
            u.watched_title_tokens.insert(std::move(t));
        }
    }
    // rule_positive iterates in (user, program) order, so watched_programs is
    // already sorted by program id per user.

    // Rank quantile among programs with at least one view: the fraction of
    // ranked programs with strictly fewer views.
    if (!stats.program_views.empty()) {
        std::vector<std::pair<ProgramId, int>> ranked(stats.program_views.begin(),
                                                      stats.program_views.end());
        std::sort(ranked.begin(), ranked.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        size_t n = ranked.size();
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j < n && ranked[j].second == ranked[i].second) ++j;
            double quantile = static_cast<double>(i) / static_cast<double>(n);
            for (size_t t = i; t < j; ++t) stats.program_rank_quantile[ranked[t].first] = quantile;
            i = j;
        }
    }
    return stats;
}

StatsBundle build_stats_bundle(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                               WeekRange window, const PreferenceRule& rule) {
    StatsBundle bundle{
        build_stats(log, catalog, clock, window, rule),
        build_stats(log, catalog, clock, {window.last, window.last}, rule),
        build_stats(log, catalog, clock, {std::max(window.first, window.last - 1), window.last},
                    rule),
    };
    return bundle;
}

namespace {

std::vector<std::string> sorted_title_tokens(const std::string& title) {
    std::vector<std::string> tokens = tokenize(title, default_stopwords());
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

double jaccard_title(const Program& candidate, const UserWindowStats* user,
                     const TitleTokenCache* cache) {
    if (!user || user->watched_title_tokens.empty()) return 0.0;
    const std::vector<std::string>* cand_tokens = nullptr;
    std::vector<std::string> scratch;
    if (cache) {
        auto it = cache->tokens.find(candidate.id);
        if (it != cache->tokens.end()) cand_tokens = &it->second;
    }
    if (!cand_tokens) {
        scratch = sorted_title_tokens(candidate.title);
        cand_tokens = &scratch;
    }
    if (cand_tokens->empty()) return 0.0;
    size_t inter = 0;
    for (const auto& t : *cand_tokens) inter += user->watched_title_tokens.count(t);
    size_t uni = cand_tokens->size() + user->watched_title_tokens.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct RecencyView {
    double prog_views = 0, prog_watch_share = 0, channel_share = 0;
    double category_share = 0, subcategory_share = 0;
    double present = 0;
};

RecencyView recency_view(UserId user, const Candidate& candidate, const Program& program,
                         const HistoryStats& stats) {
    RecencyView v;
    const UserWindowStats* u = stats.user(user);
    if (!u) return v;
    v.present = 1.0;
    auto views = u->program_views.find(candidate.program);
    v.prog_views = views == u->program_views.end() ? 0.0 : static_cast<double>(views->second);
    if (u->total_watch_seconds > 0) {
        auto ws = u->program_watch_seconds.find(candidate.program);
        if (ws != u->program_watch_seconds.end()) {
            v.prog_watch_share =
                static_cast<double>(ws->second) / static_cast<double>(u->total_watch_seconds);
        }
    }
    v.channel_share = u->channel_share(candidate.channel);
    v.category_share = u->category_share(program.category);
    v.subcategory_share = u->subcategory_share(program.subcategory);
    return v;
}

}  // namespace

TitleTokenCache TitleTokenCache::build(const Catalog& catalog) {
    TitleTokenCache cache;
    for (const auto& [id, program] : catalog.programs) {
        cache.tokens.emplace(id, sorted_title_tokens(program.title));
    }
    return cache;
}

FeatureVector extract_features(UserId user, const Candidate& candidate, Timestamp context,
                               const StatsBundle& stats, const Catalog& catalog, double cb_score,
                               const CfScores& cf, const TitleTokenCache* title_cache) {
    const Program& program = catalog.at(candidate.program);
    const HistoryStats& full = stats.full;
    const UserWindowStats* u = full.user(user);

    FeatureVector fv;
    fv.values.assign(feature_schema().size(), 0.0);
    double* f = fv.values.data();
    int i = 0;

    // repetition
    double prog_views = 0, prog_watch_share = 0;
    Timestamp last_watch = 0;
    bool watched_before = false;
    int days_watched = 0;
    if (u) {
        auto vit = u->program_views.find(candidate.program);
        prog_views = vit == u->program_views.end() ? 0.0 : static_cast<double>(vit->second);
        if (u->total_watch_seconds > 0) {
            auto wit = u->program_watch_seconds.find(candidate.program);
            if (wit != u->program_watch_seconds.end()) {
                prog_watch_share = static_cast<double>(wit->second) /
                                   static_cast<double>(u->total_watch_seconds);
            }
        }
        auto lit = u->last_watch.find(candidate.program);
        if (lit != u->last_watch.end()) {
            watched_before = true;
            last_watch = lit->second;
        }
        auto dit = u->days_watched.find(candidate.program);
        days_watched = dit == u->days_watched.end() ? 0 : dit->second;
    }
    f[i++] = prog_views;
    f[i++] = prog_watch_share;
    f[i++] = u ? u->channel_share(candidate.channel) : 0.0;
    f[i++] = full.rank_quantile_of(candidate.program);
    f[i++] = full.audience_share_of(candidate.program);
    double episodes_watched = program.is_series ? static_cast<double>(days_watched) : 0.0;
    f[i++] = episodes_watched;
    f[i++] = program.is_series
                 ? std::max(0.0, static_cast<double>(program.episode_count) - episodes_watched)
                 : 0.0;

    // category
    f[i++] = u ? u->category_share(program.category) : 0.0;
    f[i++] = u ? u->subcategory_share(program.subcategory) : 0.0;
    f[i++] = full.category_share(program.category);
    f[i++] = full.subcategory_share(program.subcategory);

    // time
    f[i++] = is_weekend(candidate.start) ? 1.0 : 0.0;
    DayPart part = daypart_of(context);
    f[i++] = part == DayPart::Morning ? 1.0 : 0.0;
    f[i++] = part == DayPart::Afternoon ? 1.0 : 0.0;
    f[i++] = part == DayPart::Evening ? 1.0 : 0.0;
    f[i++] = part == DayPart::Night ? 1.0 : 0.0;
    f[i++] = u ? u->daypart_share(part) : 0.0;
    f[i++] = std::max<double>(0.0, static_cast<double>(context - candidate.start)) / 3600.0;
    f[i++] = watched_before
                 ? std::max<double>(0.0, static_cast<double>(context - last_watch)) / 86400.0
                 : 0.0;

    // text
    f[i++] = jaccard_title(program, u, title_cache);
    f[i++] = cb_score;

    // characteristics
    f[i++] = program.is_series ? 1.0 : 0.0;
    f[i++] = static_cast<double>(program.episode_count);
    f[i++] = std::max<double>(0.0, static_cast<double>(context - program.first_broadcast)) / 86400.0;
    f[i++] = static_cast<double>(program.duration_s) / 3600.0;

    // collaborative
    f[i++] = cf.wrmf;
    f[i++] = cf.sgd;

    // recency
    RecencyView r1 = recency_view(user, candidate, program, stats.last1);
    RecencyView r2 = recency_view(user, candidate, program, stats.last2);
    f[i++] = r1.prog_views;
    f[i++] = r1.prog_watch_share;
    f[i++] = r1.channel_share;
    f[i++] = r1.category_share;
    f[i++] = r1.subcategory_share;
    f[i++] = r2.prog_views;
    f[i++] = r2.prog_watch_share;
    f[i++] = r2.channel_share;
    f[i++] = r2.category_share;
    f[i++] = r2.subcategory_share;

    // presence indicators
    bool prog_hist = full.views_of(candidate.program) > 0;
    bool prev_broadcast = program.first_broadcast < candidate.start;
    f[i++] = u ? 1.0 : 0.0;
    f[i++] = prog_hist ? 1.0 : 0.0;
    f[i++] = watched_before ? 1.0 : 0.0;
    f[i++] = prev_broadcast ? 1.0 : 0.0;
    f[i++] = r1.present;
    f[i++] = r2.present;

    if (static_cast<size_t>(i) != feature_schema().size()) {
        throw std::logic_error("feature schema length mismatch");
    }
    return fv;
}

// ---------------------------------------------------------------------------
// SGD matrix factorization (feature signal only)

SgdMfModel SgdMfModel::fit(const std::vector<BinaryPreference>& prefs, const SgdMfParams& params) {
    SgdMfModel model;
    model.factors_ = params.factors;

    std::vector<UserId> users;
    std::vector<ProgramId> items;
    for (const auto& p : prefs) {
        users.push_back(p.user);
        items.push_back(p.program);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    for (size_t i = 0; i < users.size(); ++i) model.user_index_[users[i]] = static_cast<int>(i);
    for (size_t i = 0; i < items.size(); ++i) model.item_index_[items[i]] = static_cast<int>(i);

    const int f = params.factors;
    SplitMix64 rng(params.seed);
    model.user_factors_.resize(users.size() * static_cast<size_t>(f));
    model.item_factors_.resize(items.size() * static_cast<size_t>(f));
    for (double& v : model.user_factors_) v = rng.next_double() * 0.1;
    for (double& v : model.item_factors_) v = rng.next_double() * 0.1;

    std::vector<size_t> order(prefs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        // Deterministic per-epoch shuffle.
        SplitMix64 shuffle_rng(params.seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(shuffle_rng.next_below(i));
            std::swap(order[i - 1], order[j]);
        }
        for (size_t idx : order) {
            const auto& p = prefs[idx];
            double* xu = &model.user_factors_[static_cast<size_t>(model.user_index_[p.user]) * f];
            double* yi = &model.item_factors_[static_cast<size_t>(model.item_index_[p.program]) * f];
            double pred = 0;
            for (int k = 0; k < f; ++k) pred += xu[k] * yi[k];
            double err = p.label - pred;
            for (int k = 0; k < f; ++k) {
                double xk = xu[k];
                xu[k] += params.learning_rate * (err * yi[k] - params.reg * xk);
                yi[k] += params.learning_rate * (err * xk - params.reg * yi[k]);
            }
        }
    }
    return model;
}

double SgdMfModel::predict(UserId user, ProgramId program) const {
    auto uit = user_index_.find(user);
    auto iit = item_index_.find(program);
    if (uit == user_index_.end() || iit == item_index_.end()) return 0.0;
    const double* xu = &user_factors_[static_cast<size_t>(uit->second) * factors_];
    const double* yi = &item_factors_[static_cast<size_t>(iit->second) * factors_];
    double dot = 0;
    for (int k = 0; k < factors_; ++k) dot += xu[k] * yi[k];
    return dot;
}

}  // namespace tvrec
