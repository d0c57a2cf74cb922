// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "tvrec/metrics.hpp"
#include "tvrec/parallel.hpp"
#include "tvrec/rng.hpp"

namespace tvrec {

std::vector<FoldSpec> make_folds(int total_weeks) {
    if (total_weeks < 6) {
        throw std::invalid_argument("need at least 6 weeks for a fold, got " +
                                    std::to_string(total_weeks));
    }
    std::vector<FoldSpec> folds;
    for (int f = 0; f + 6 <= total_weeks; ++f) {
        FoldSpec fold;
        fold.history_weeks = {f, f + 1, f + 2, f + 3};
        fold.train_label_week = f + 4;
        fold.target_week = f + 5;
        folds.push_back(fold);
    }
    return folds;
}

const char* to_string(ScenarioKind s) {
    return s == ScenarioKind::LiveTV ? "live" : "catchup";
}

const char* to_string(FeedbackSource f) {
    return f == FeedbackSource::LiveAndCatchup ? "live+catchup" : "catchup-only";
}

std::vector<Session> user_sessions(const ViewLog& log, const WeekClock& clock, int week,
                                   std::int64_t max_gap_seconds) {
    std::vector<Session> sessions;
    UserId cur_user = 0;
    Timestamp session_start = 0;
    Timestamp last_end = 0;
    bool open = false;
    for (const ViewEvent& ev : log.events) {
        if (clock.week_of(ev.watch_start) != week) continue;
        if (!open || ev.user != cur_user || ev.watch_start - last_end >= max_gap_seconds) {
            if (open) sessions.push_back({cur_user, session_start});
            cur_user = ev.user;
            session_start = ev.watch_start;
            last_end = ev.watch_start + ev.watched_seconds;
            open = true;
        } else {
            last_end = std::max(last_end, ev.watch_start + ev.watched_seconds);
        }
    }
    if (open) sessions.push_back({cur_user, session_start});
    return sessions;
}

namespace {

// Airings sorted by start: the first index with start >= t.
size_t airing_lower_bound(const std::vector<Airing>& airings, Timestamp t) {
    return static_cast<size_t>(
        std::lower_bound(airings.begin(), airings.end(), t,
                         [](const Airing& a, Timestamp v) { return a.start < v; }) -
        airings.begin());
}

}  // namespace

std::vector<Candidate> live_candidates(Timestamp t, const Catalog& catalog) {
    std::map<ProgramId, Candidate> best;
    size_t begin = airing_lower_bound(catalog.airings, t - catalog.max_airing_seconds);
    for (size_t i = begin; i < catalog.airings.size(); ++i) {
        const Airing& a = catalog.airings[i];
        if (a.start > t) break;
        if (t >= a.end) continue;
        Candidate c{a.program, a.channel, a.start, a.end};
        auto [it, inserted] = best.try_emplace(a.program, c);
        if (!inserted && a.channel < it->second.channel) it->second = c;
    }
    std::vector<Candidate> out;
    out.reserve(best.size());
    for (const auto& [id, c] : best) out.push_back(c);
    return out;
}

std::vector<Candidate> catchup_candidates(Timestamp t, const Catalog& catalog) {
    std::map<ProgramId, Candidate> best;
    size_t begin = airing_lower_bound(catalog.airings, t - kCatchupWindowSeconds);
    for (size_t i = begin; i < catalog.airings.size(); ++i) {
        const Airing& a = catalog.airings[i];
        if (a.start > t) break;
        Candidate c{a.program, a.channel, a.start, a.end};
        auto [it, inserted] = best.try_emplace(a.program, c);
        if (!inserted) {
            // Freshest airing represents the program; ties take the lower channel.
            if (a.start > it->second.start ||
                (a.start == it->second.start && a.channel < it->second.channel)) {
                it->second = c;
            }
        }
    }
    std::vector<Candidate> out;
    out.reserve(best.size());
    for (const auto& [id, c] : best) out.push_back(c);
    return out;
}

ViewLog filter_feedback(const ViewLog& log, FeedbackSource source) {
    if (source == FeedbackSource::LiveAndCatchup) return log;
    ViewLog out;
    out.dropped_unknown_program = log.dropped_unknown_program;
    out.dropped_outside_window = log.dropped_outside_window;
    for (const ViewEvent& ev : log.events) {
        if (ev.mode == ViewMode::CatchUp) out.events.push_back(ev);
    }
    return out;
}

namespace {

std::vector<WatchCount> watch_counts(const ViewLog& log, const WeekClock& clock, WeekRange range) {
    std::map<std::pair<UserId, ProgramId>, double> counts;
    for (const ViewEvent& ev : log.events) {
        int w = clock.week_of(ev.watch_start);
        if (range.contains(w)) counts[{ev.user, ev.program}] += 1.0;
    }
    std::vector<WatchCount> out;
    out.reserve(counts.size());
    for (const auto& [key, r] : counts) out.push_back({key.first, key.second, r});
    return out;
}

std::vector<BinaryPreference> binary_prefs(const std::vector<Interaction>& interactions,
                                           WeekRange range) {
    std::map<std::pair<UserId, ProgramId>, double> prefs;
    for (const Interaction& it : interactions) {
        if (!range.contains(it.week)) continue;
        auto [entry, inserted] = prefs.try_emplace({it.user, it.program},
                                                   static_cast<double>(it.preference));
        if (!inserted) entry->second = std::max(entry->second, static_cast<double>(it.preference));
    }
    std::vector<BinaryPreference> out;
    out.reserve(prefs.size());
    for (const auto& [key, label] : prefs) out.push_back({key.first, key.second, label});
    return out;
}

// Rule-positive (user, program) pairs per week, the ground-truth source.
using TruthIndex = std::map<std::pair<UserId, int>, std::set<ProgramId>>;

TruthIndex truth_index(const std::vector<Interaction>& interactions) {
    TruthIndex index;
    for (const Interaction& it : interactions) {
        if (it.preference == 1) index[{it.user, it.week}].insert(it.program);
    }
    return index;
}

// Programs each user saw (any event) strictly before a given week.
std::unordered_map<UserId, std::set<ProgramId>> seen_before(const ViewLog& log,
                                                            const WeekClock& clock, int week) {
    std::unordered_map<UserId, std::set<ProgramId>> seen;
    for (const ViewEvent& ev : log.events) {
        if (clock.week_of(ev.watch_start) < week) seen[ev.user].insert(ev.program);
    }
    return seen;
}

std::unordered_map<UserId, TfIdfIndex::Profile> build_profiles(const HistoryStats& stats,
                                                               const TfIdfIndex& tfidf,
                                                               int history_cap) {
    std::vector<UserId> ids;
    ids.reserve(stats.users.size());
    for (const auto& [u, _] : stats.users) ids.push_back(u);
    std::sort(ids.begin(), ids.end());

    std::unordered_map<UserId, TfIdfIndex::Profile> profiles;
    for (UserId u : ids) profiles.emplace(u, TfIdfIndex::Profile{});
    par_for(ids.size(), [&](size_t i) {
        const UserWindowStats& us = stats.users.at(ids[i]);
        std::vector<ProgramId> history;
        history.reserve(us.watched_programs.size());
        for (const auto& [pid, ch] : us.watched_programs) history.push_back(pid);
        if (history_cap > 0 && static_cast<int>(history.size()) > history_cap) {
            // Keep the most recently watched programs.
            std::sort(history.begin(), history.end(), [&](ProgramId a, ProgramId b) {
                Timestamp ta = us.last_watch.at(a), tb = us.last_watch.at(b);
                if (ta != tb) return ta > tb;
                return a < b;
            });
            history.resize(static_cast<size_t>(history_cap));
        }
        profiles[ids[i]] = tfidf.build_profile(history);
    });
    return profiles;
}

std::vector<FeatureVector> features_for(UserId user, Timestamp context,
                                        const std::vector<Candidate>& candidates,
                                        const StatsBundle& stats, const Catalog& catalog,
                                        const TfIdfIndex& tfidf,
                                        const std::unordered_map<UserId, TfIdfIndex::Profile>& cb,
                                        const MfModel& wrmf_model, const SgdMfModel& sgd_model,
                                        const TitleTokenCache& title_tokens) {
    const TfIdfIndex::Profile* profile = nullptr;
    auto pit = cb.find(user);
    if (pit != cb.end()) profile = &pit->second;

    std::vector<FeatureVector> out(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        double cb_score = profile ? tfidf.score_profile(c.program, *profile) : 0.0;
        CfScores cf{wrmf_model.predict(user, c.program), sgd_model.predict(user, c.program)};
        out[i] = extract_features(user, c, context, stats, catalog, cb_score, cf, &title_tokens);
    }
    return out;
}

}  // namespace

FoldModels train_fold(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                      const FoldSpec& fold, const TfIdfIndex& tfidf, const EvalConfig& config) {
    FoldModels m;
    m.fold = fold;
    m.tfidf = &tfidf;
    m.title_tokens = TitleTokenCache::build(catalog);

    std::vector<Interaction> interactions = build_interactions(log, catalog, config.rule, clock);

    m.stats_train = build_stats_bundle(log, catalog, clock, fold.history_range(), config.rule);
    m.stats_eval = build_stats_bundle(log, catalog, clock, fold.eval_history_range(), config.rule);
    m.stats_base = build_stats(log, catalog, clock, fold.pre_target_range(), config.rule);

    std::uint64_t fold_seed = mix_seed(config.seed, static_cast<std::uint64_t>(fold.target_week));

    WrmfParams wp = config.wrmf;
    wp.seed = mix_seed(fold_seed, 1);
    auto counts_train = watch_counts(log, clock, fold.history_range());
    m.wrmf_feat_train = counts_train.empty() ? MfModel{} : wrmf_fit(counts_train, wp);
    wp.seed = mix_seed(fold_seed, 2);
    auto counts_eval = watch_counts(log, clock, fold.eval_history_range());
    m.wrmf_feat_eval = counts_eval.empty() ? MfModel{} : wrmf_fit(counts_eval, wp);
    wp.seed = mix_seed(fold_seed, 3);
    auto counts_base = watch_counts(log, clock, fold.pre_target_range());
    m.wrmf_algo = counts_base.empty() ? MfModel{} : wrmf_fit(counts_base, wp);

    SgdMfParams sp = config.sgd;
    sp.seed = mix_seed(fold_seed, 4);
    m.sgd_feat_train = SgdMfModel::fit(binary_prefs(interactions, fold.history_range()), sp);
    sp.seed = mix_seed(fold_seed, 5);
    m.sgd_feat_eval = SgdMfModel::fit(binary_prefs(interactions, fold.eval_history_range()), sp);

    m.cb_train = build_profiles(m.stats_train.full, tfidf, config.content_history_cap);
    m.cb_eval = build_profiles(m.stats_eval.full, tfidf, config.content_history_cap);
    m.cb_base = build_profiles(m.stats_base, tfidf, config.content_history_cap);

    // Training queries: one per user session in the label week, candidates
    // from the 7-day catch-up pool (Live evaluation post-filters later).
    TruthIndex truth = truth_index(interactions);
    std::vector<Session> sessions = user_sessions(log, clock, fold.train_label_week);

    struct QueryDocs {
        Session session;
        std::vector<Candidate> candidates;
        std::vector<int> labels;
        std::vector<FeatureVector> features;
        bool valid = false;
    };
    std::vector<QueryDocs> queries(sessions.size());
    par_for(sessions.size(), [&](size_t s) {
        QueryDocs& q = queries[s];
        q.session = sessions[s];
        std::vector<Candidate> candidates = catchup_candidates(q.session.start, catalog);
        if (candidates.size() < 2) return;

        const std::set<ProgramId>* positives = nullptr;
        auto tit = truth.find({q.session.user, fold.train_label_week});
        if (tit != truth.end()) positives = &tit->second;

        std::vector<Candidate> kept;
        std::vector<int> labels;
        int n_pos = 0;
        std::vector<std::pair<std::uint64_t, size_t>> negatives;
        for (size_t i = 0; i < candidates.size(); ++i) {
            bool pos = positives && positives->count(candidates[i].program) > 0;
            if (pos) {
                kept.push_back(candidates[i]);
                labels.push_back(1);
                ++n_pos;
            } else {
                negatives.emplace_back(
                    mix_seed(config.seed, static_cast<std::uint64_t>(q.session.user),
                             static_cast<std::uint64_t>(candidates[i].program)),
                    i);
            }
        }
        if (n_pos == 0 || negatives.empty()) return;  // LambdaMART needs both classes
        std::sort(negatives.begin(), negatives.end());
        size_t cap = config.negative_cap > 0
                         ? std::min<size_t>(negatives.size(), static_cast<size_t>(config.negative_cap))
                         : negatives.size();
        for (size_t i = 0; i < cap; ++i) {
            kept.push_back(candidates[negatives[i].second]);
            labels.push_back(0);
        }
        // Keep documents id-sorted within the query.
        std::vector<size_t> order(kept.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return kept[a].program < kept[b].program;
        });
        std::vector<Candidate> sorted_cands;
        std::vector<int> sorted_labels;
        for (size_t i : order) {
            sorted_cands.push_back(kept[i]);
            sorted_labels.push_back(labels[i]);
        }
        q.candidates = std::move(sorted_cands);
        q.labels = std::move(sorted_labels);
        q.features = features_for(q.session.user, q.session.start, q.candidates, m.stats_train,
                                  catalog, tfidf, m.cb_train, m.wrmf_feat_train, m.sgd_feat_train,
                                  m.title_tokens);
        q.valid = true;
    });

    // 80/20 train/validation split by user.
    for (const QueryDocs& q : queries) {
        if (!q.valid) continue;
        bool validation =
            mix_seed(config.seed, 0x7A11D, static_cast<std::uint64_t>(q.session.user)) % 5 == 0;
        RankingDataset& target = validation ? m.valid_ds : m.train_ds;
        target.begin_query(mix_seed(static_cast<std::uint64_t>(q.session.user),
                                    static_cast<std::uint64_t>(q.session.start)));
        for (size_t i = 0; i < q.candidates.size(); ++i) {
            target.add_doc(q.features[i].values, q.labels[i],
                           static_cast<std::uint64_t>(q.candidates[i].program));
        }
        target.end_query(2);
    }

    LtrParams lp = config.ltr;
    lp.seed = mix_seed(fold_seed, 6);
    if (m.train_ds.num_docs() > 0) {
        m.ltr = ltr_fit(m.train_ds, m.valid_ds, lp, &m.fit_report);
    } else {
        m.ltr.num_features = feature_schema().size();
        m.ltr.learning_rate = lp.learning_rate;
    }
    return m;
}

namespace {

struct SessionMetrics {
    // metric x k -> value; NaN marks "undefined for this session".
    std::map<std::pair<std::string, int>, double> values;
    bool skipped = false;
    UserId user = 0;
};

std::vector<ProgramId> top_ids(const std::vector<ScoredEntry>& entries, size_t k) {
    std::vector<ProgramId> ids;
    ids.reserve(std::min(entries.size(), k));
    for (size_t i = 0; i < entries.size() && i < k; ++i) ids.push_back(entries[i].program);
    return ids;
}

}  // namespace

std::vector<MetricRow> evaluate_scenario(const FoldModels& models, const ViewLog& log,
                                         const Catalog& catalog, const WeekClock& clock,
                                         ScenarioKind scenario, const EvalConfig& config) {
    const FoldSpec& fold = models.fold;
    std::vector<Interaction> interactions = build_interactions(log, catalog, config.rule, clock);
    TruthIndex truth = truth_index(interactions);
    auto seen = seen_before(log, clock, fold.target_week);

    std::vector<Session> sessions = user_sessions(log, clock, fold.target_week);
    if (config.weekly_reference) {
        // One reference point per user: their first session of the week.
        std::vector<Session> first;
        std::set<UserId> used;
        for (const Session& s : sessions) {
            if (used.insert(s.user).second) first.push_back(s);
        }
        sessions = std::move(first);
    }

    const int max_k = *std::max_element(config.ks.begin(), config.ks.end());
    std::vector<SessionMetrics> results(sessions.size());

    par_for(sessions.size(), [&](size_t si) {
        const Session& session = sessions[si];
        SessionMetrics& res = results[si];
        res.user = session.user;

        std::vector<Candidate> candidates = scenario == ScenarioKind::LiveTV
                                                ? live_candidates(session.start, catalog)
                                                : catchup_candidates(session.start, catalog);
        if (candidates.empty()) {
            res.skipped = true;
            return;
        }

        std::set<ProgramId> session_truth;
        auto tit = truth.find({session.user, fold.target_week});
        if (tit != truth.end()) {
            for (const Candidate& c : candidates) {
                if (tit->second.count(c.program)) session_truth.insert(c.program);
            }
        }
        const std::set<ProgramId>* seen_set = nullptr;
        auto sit = seen.find(session.user);
        if (sit != seen.end()) seen_set = &sit->second;
        std::set<ProgramId> new_truth;
        for (ProgramId p : session_truth) {
            if (!seen_set || seen_set->count(p) == 0) new_truth.insert(p);
        }

        // Candidates are sorted by program id; parallel arrays + binary
        // search replace per-session maps.
        std::vector<ProgramTraits> cand_traits(candidates.size());
        std::vector<int> cand_audience(candidates.size());
        for (size_t i = 0; i < candidates.size(); ++i) {
            const Program& prog = catalog.at(candidates[i].program);
            cand_traits[i] = {prog.category, prog.subcategory, candidates[i].channel};
            cand_audience[i] = models.stats_base.audience_of(candidates[i].program);
        }
        auto index_of = [&](ProgramId p) {
            size_t lo = 0, hi = candidates.size();
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (candidates[mid].program < p) lo = mid + 1;
                else hi = mid;
            }
            return lo;
        };
        std::vector<ProgramTraits> history_traits;
        if (const UserWindowStats* us = models.stats_base.user(session.user)) {
            for (const auto& [pid, ch] : us->watched_programs) {
                const Program* prog = catalog.find(pid);
                if (prog) history_traits.push_back({prog->category, prog->subcategory, ch});
            }
        }

        // L2R scores are shared by the l2r row and the greedy re-ranker.
        std::vector<double> l2r_scores;
        bool has_l2r = false;
        auto ensure_l2r = [&] {
            if (has_l2r) return;
            std::vector<FeatureVector> fv =
                features_for(session.user, session.start, candidates, models.stats_eval, catalog,
                             *models.tfidf, models.cb_eval, models.wrmf_feat_eval,
                             models.sgd_feat_eval, models.title_tokens);
            l2r_scores.resize(candidates.size());
            for (size_t i = 0; i < candidates.size(); ++i) {
                l2r_scores[i] = models.ltr.trees.empty() && models.ltr.num_features == 0
                                    ? 0.0
                                    : models.ltr.predict(fv[i].values);
            }
            has_l2r = true;
        };

        auto record = [&](const std::string& algorithm, const std::vector<ScoredEntry>& ranked) {
            for (int k : config.ks) {
                std::vector<ProgramId> ids = top_ids(ranked, static_cast<size_t>(k));
                std::vector<ProgramTraits> traits;
                std::vector<int> audiences;
                for (ProgramId p : ids) {
                    size_t i = index_of(p);
                    traits.push_back(cand_traits[i]);
                    audiences.push_back(cand_audience[i]);
                }
                auto put = [&](const std::string& metric, double v) {
                    res.values[{algorithm + "/" + metric, k}] = v;
                };
                auto ndcg = ndcg_at_k(ids, session_truth, k);
                if (ndcg) put("ndcg", *ndcg);
                put("ild", ild_at_k(traits, k));
                put("msi", msi_at_k(audiences, k, std::max(1, models.stats_base.total_users)));
                put("seren", unexpectedness_at_k(traits, history_traits, k));
                // Accuracy (new): only entries the algorithm actually scored
                // (score != 0); relevance = watched and never seen before.
                if (!new_truth.empty()) {
                    std::vector<ProgramId> scored_ids;
                    for (const ScoredEntry& e : ranked) {
                        if (e.score != 0.0) scored_ids.push_back(e.program);
                        if (scored_ids.size() >= static_cast<size_t>(k)) break;
                    }
                    auto ndcg_new = ndcg_at_k(scored_ids, new_truth, k);
                    put("ndcg_new", ndcg_new ? *ndcg_new : 0.0);
                }
            }
        };

        for (const std::string& algorithm : config.algorithms) {
            if (algorithm == "random") {
                record(algorithm,
                       random_rank(candidates,
                                   mix_seed(config.seed, static_cast<std::uint64_t>(session.user),
                                            static_cast<std::uint64_t>(session.start)))
                           .entries);
            } else if (algorithm == "popular") {
                record(algorithm, popular_rank(candidates, models.stats_base).entries);
            } else if (algorithm == "userpopular") {
                record(algorithm,
                       user_popular_rank(session.user, candidates, models.stats_base).entries);
            } else if (algorithm == "wrmf") {
                std::vector<ScoredEntry> entries;
                for (const Candidate& c : candidates) {
                    entries.push_back({c.program, models.wrmf_algo.predict(session.user, c.program)});
                }
                sort_entries(entries);
                record(algorithm, entries);
            } else if (algorithm == "content") {
                const TfIdfIndex::Profile* profile = nullptr;
                auto pit = models.cb_base.find(session.user);
                if (pit != models.cb_base.end()) profile = &pit->second;
                std::vector<ScoredEntry> entries;
                for (const Candidate& c : candidates) {
                    double s = profile ? models.tfidf->score_profile(c.program, *profile) : 0.0;
                    entries.push_back({c.program, s});
                }
                sort_entries(entries);
                record(algorithm, entries);
            } else if (algorithm == "l2r") {
                ensure_l2r();
                std::vector<ScoredEntry> entries;
                for (size_t i = 0; i < candidates.size(); ++i) {
                    entries.push_back({candidates[i].program, l2r_scores[i]});
                }
                sort_entries(entries);
                record(algorithm, entries);
            } else if (algorithm == "greedyrec") {
                ensure_l2r();
                // Pool: full candidate set, or the model's top-m.
                std::vector<size_t> pool_idx(candidates.size());
                for (size_t i = 0; i < pool_idx.size(); ++i) pool_idx[i] = i;
                if (config.rerank_pool > 0 &&
                    pool_idx.size() > static_cast<size_t>(config.rerank_pool)) {
                    std::sort(pool_idx.begin(), pool_idx.end(), [&](size_t a, size_t b) {
                        if (l2r_scores[a] != l2r_scores[b]) return l2r_scores[a] > l2r_scores[b];
                        return candidates[a].program < candidates[b].program;
                    });
                    pool_idx.resize(static_cast<size_t>(config.rerank_pool));
                    std::sort(pool_idx.begin(), pool_idx.end());
                }
                RerankContext ctx;
                for (size_t i : pool_idx) {
                    ctx.ids.push_back(candidates[i].program);
                    ctx.traits.push_back(cand_traits[i]);
                    ctx.model_scores.push_back(l2r_scores[i]);
                    ctx.audience.push_back(cand_audience[i]);
                }
                ctx.total_users = std::max(1, models.stats_base.total_users);
                ctx.user_history = history_traits;
                ObjectiveSpec spec = config.objective;
                spec.k = max_k;
                spec.accuracy_source = AccuracySource::ModelScore;
                std::vector<int> picks = greedy_rec(spec, ctx);
                std::vector<ScoredEntry> entries;
                for (int i : picks) {
                    entries.push_back({ctx.ids[static_cast<size_t>(i)],
                                       ctx.model_scores[static_cast<size_t>(i)]});
                }
                record(algorithm, entries);
            } else {
                throw std::invalid_argument("unknown algorithm: " + algorithm);
            }
        }
    });

    // Mean over sessions per user, then over users; metrics missing for a
    // session (undefined nDCG) are excluded from that session's average.
    std::map<std::pair<std::string, int>, std::map<UserId, std::pair<double, int>>> per_user;
    for (const SessionMetrics& res : results) {
        if (res.skipped) continue;
        for (const auto& [key, value] : res.values) {
            auto& acc = per_user[key][res.user];
            acc.first += value;
            acc.second += 1;
        }
    }

    std::vector<MetricRow> rows;
    std::map<std::pair<std::string, int>, double> averages;
    for (const auto& [key, users] : per_user) {
        double sum = 0;
        for (const auto& [user, acc] : users) sum += acc.first / acc.second;
        averages[key] = sum / static_cast<double>(users.size());
    }
    const std::string scenario_name = to_string(scenario);
    for (const std::string& algorithm : config.algorithms) {
        for (const char* metric : {"ndcg", "ild", "msi", "seren", "ndcg_new"}) {
            for (int k : config.ks) {
                auto it = averages.find({algorithm + "/" + metric, k});
                double v = it == averages.end() ? 0.0 : it->second;
                rows.push_back({algorithm, scenario_name, metric, k, v});
            }
        }
        for (int k : config.ks) {
            auto get = [&](const char* metric) {
                auto it = averages.find({algorithm + "/" + std::string(metric), k});
                return it == averages.end() ? 0.0 : it->second;
            };
            double obj = objective_of_averages(config.objective, get("ndcg"), get("ild"),
                                               get("msi"), get("seren"));
            rows.push_back({algorithm, scenario_name, "obj", k, obj});
        }
    }
    return rows;
}

FoldResult evaluate_run(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                        const FoldSpec& fold, ScenarioKind scenario, const TfIdfIndex& tfidf,
                        const EvalConfig& config) {
    FoldModels models = train_fold(log, catalog, clock, fold, tfidf, config);
    FoldResult result;
    result.rows = evaluate_scenario(models, log, catalog, clock, scenario, config);
    result.validation_ndcg = models.fit_report.validation_ndcg;
    return result;
}

CrossValReport cross_validate(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                              FeedbackSource feedback, const std::vector<ScenarioKind>& scenarios,
                              const EvalConfig& config) {
    ViewLog filtered = filter_feedback(log, feedback);
    if (filtered.events.empty()) throw std::invalid_argument("no events after feedback filtering");

    int total_weeks = 0;
    for (const ViewEvent& ev : filtered.events) {
        total_weeks = std::max(total_weeks, clock.week_of(ev.watch_start) + 1);
    }
    std::vector<FoldSpec> folds = make_folds(total_weeks);

    TfIdfIndex tfidf = TfIdfIndex::build(catalog, default_stopwords());

    CrossValReport report;
    report.n_folds = static_cast<int>(folds.size());
    std::map<std::tuple<std::string, std::string, std::string, int>, std::pair<double, int>> acc;

    for (size_t f = 0; f < folds.size(); ++f) {
        FoldModels models = train_fold(filtered, catalog, clock, folds[f], tfidf, config);
        report.validation_ndcg_per_fold.push_back(models.fit_report.validation_ndcg);
        for (ScenarioKind scenario : scenarios) {
            std::vector<MetricRow> rows =
                evaluate_scenario(models, filtered, catalog, clock, scenario, config);
            for (const MetricRow& row : rows) {
                report.per_fold.emplace_back(static_cast<int>(f), row);
                auto& a = acc[{row.scenario, row.algorithm, row.metric, row.k}];
                a.first += row.value;
                a.second += 1;
            }
        }
    }
    for (const auto& [key, sum_count] : acc) {
        const auto& [scenario, algorithm, metric, k] = key;
        report.averaged.push_back(
            {algorithm, scenario, metric, k, sum_count.first / sum_count.second});
    }
    std::sort(report.averaged.begin(), report.averaged.end(),
              [](const MetricRow& a, const MetricRow& b) {
                  return std::tie(a.scenario, a.algorithm, a.metric, a.k) <
                         std::tie(b.scenario, b.algorithm, b.metric, b.k);
              });
    return report;
}

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_report_csv(const std::string& path, const std::vector<MetricRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "algorithm,scenario,metric,k,value\n";
    for (const MetricRow& row : rows) {
        out << row.algorithm << ',' << row.scenario << ',' << row.metric << ',' << row.k << ','
            << format_value(row.value) << "\n";
    }
}

void write_fold_csv(const std::string& path, const std::vector<std::pair<int, MetricRow>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "fold,algorithm,scenario,metric,k,value\n";
    for (const auto& [fold, row] : rows) {
        out << fold << ',' << row.algorithm << ',' << row.scenario << ',' << row.metric << ','
            << row.k << ',' << format_value(row.value) << "\n";
    }
}

std::string render_tables(const CrossValReport& report) {
    std::map<std::tuple<std::string, std::string, std::string, int>, double> values;
    std::set<std::string> scenarios;
    for (const MetricRow& row : report.averaged) {
        values[{row.scenario, row.algorithm, row.metric, row.k}] = row.value;
        scenarios.insert(row.scenario);
    }
    const std::vector<std::pair<std::string, std::string>> algorithms = {
        {"random", "Random"},     {"popular", "Popular"}, {"userpopular", "UserPopular"},
        {"wrmf", "WRMF"},         {"content", "Content-based"},
        {"l2r", "L2R"},           {"greedyrec", "GreedyRec"},
    };
    const std::vector<std::pair<std::string, std::string>> columns = {
        {"ndcg", "nDCG"}, {"ild", "ILD"}, {"msi", "MSI"},
        {"seren", "Seren"}, {"ndcg_new", "new-nDCG"}, {"obj", "Obj"},
    };
    std::string out;
    char buf[64];
    for (const std::string& scenario : scenarios) {
        out += "Scenario: " + scenario + "\n";
        std::snprintf(buf, sizeof(buf), "%-14s", "");
        out += buf;
        for (const auto& [metric, title] : columns) {
            for (int k : {5, 10}) {
                std::snprintf(buf, sizeof(buf), " %11s", (title + "@" + std::to_string(k)).c_str());
                out += buf;
            }
        }
        out += "\n";
        for (const auto& [key, title] : algorithms) {
            bool any = false;
            for (const auto& [metric, mtitle] : columns) {
                for (int k : {5, 10}) {
                    any = any || values.count({scenario, key, metric, k}) > 0;
                }
            }
            if (!any) continue;
            std::snprintf(buf, sizeof(buf), "%-14s", title.c_str());
            out += buf;
            for (const auto& [metric, mtitle] : columns) {
                for (int k : {5, 10}) {
                    auto it = values.find({scenario, key, metric, k});
                    if (it == values.end()) {
                        std::snprintf(buf, sizeof(buf), " %11s", "-");
                    } else {
                        std::snprintf(buf, sizeof(buf), " %11.3f", it->second);
                    }
                    out += buf;
                }
            }
            out += "\n";
        }
        out += "\n";
    }
    return out;
}

}  // namespace tvrec
