// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvrec/features.hpp"
#include "tvrec/ingestion.hpp"
#include "tvrec/ltr.hpp"
#include "tvrec/recommenders.hpp"
#include "tvrec/rerank.hpp"
#include "tvrec/wrmf.hpp"

namespace tvrec {

/// Six consecutive weeks: four of feature history, one of training labels,
/// one of evaluation targets.
struct FoldSpec {
    std::array<int, 4> history_weeks{};
    int train_label_week = 0;
    int target_week = 0;

    WeekRange history_range() const { return {history_weeks[0], history_weeks[3]}; }
    WeekRange eval_history_range() const { return {history_weeks[1], train_label_week}; }
    WeekRange pre_target_range() const { return {history_weeks[0], train_label_week}; }
};

/// Sliding folds advancing one week: (0-5; 1-6; ...). 10 weeks -> 5 folds.
/// Throws std::invalid_argument below 6 weeks.
std::vector<FoldSpec> make_folds(int total_weeks = 10);

enum class ScenarioKind { LiveTV, CatchUp };
enum class FeedbackSource { LiveAndCatchup, CatchupOnly };

const char* to_string(ScenarioKind s);
const char* to_string(FeedbackSource f);

/// A maximal run of one user's events with gaps under 30 minutes; the unit
/// of ranking queries. start is the first event's timestamp.
struct Session {
    UserId user = 0;
    Timestamp start = 0;
};

std::vector<Session> user_sessions(const ViewLog& log, const WeekClock& clock, int week,
                                   std::int64_t max_gap_seconds = 1800);

/// Programs with an airing containing t (start <= t < end), one candidate per
/// program (lowest channel id wins for simulcasts). Sorted by program id.
std::vector<Candidate> live_candidates(Timestamp t, const Catalog& catalog);

/// Programs available on catch-up at t: some airing has start in [t-7d, t]
/// (equivalently t inside the airing's [start, start+7d] availability
/// window). The freshest airing represents the program. Sorted by program id.
std::vector<Candidate> catchup_candidates(Timestamp t, const Catalog& catalog);

ViewLog filter_feedback(const ViewLog& log, FeedbackSource source);

struct EvalConfig {
    PreferenceRule rule = PreferenceRule::fraction_over(0.5);
    std::vector<int> ks = {5, 10};
    ObjectiveSpec objective;  // paper weights by default
    std::uint64_t seed = 7;
    LtrParams ltr;
    WrmfParams wrmf;
    SgdMfParams sgd;
    int negative_cap = 40;        // per training query; 0 keeps every candidate
    int content_history_cap = 0;  // 0 = full training-window history
    int rerank_pool = 0;          // 0 = GreedyRec sees the full candidate set
    bool weekly_reference = false;
    std::vector<std::string> algorithms = {"random", "popular",  "userpopular", "wrmf",
                                           "content", "l2r", "greedyrec"};
};

/// Everything trained once per fold and shared by both scenarios.
struct FoldModels {
    FoldSpec fold;
    StatsBundle stats_train;  // feature history for training labels
    StatsBundle stats_eval;   // history slid one week for target scoring
    HistoryStats stats_base;  // all five pre-target weeks (baselines, metrics)
    MfModel wrmf_feat_train, wrmf_feat_eval, wrmf_algo;
    SgdMfModel sgd_feat_train, sgd_feat_eval;
    GbmModel ltr;
    FitReport fit_report;
    RankingDataset train_ds, valid_ds;
    std::unordered_map<UserId, TfIdfIndex::Profile> cb_train, cb_eval, cb_base;
    TitleTokenCache title_tokens;
    const TfIdfIndex* tfidf = nullptr;
};

FoldModels train_fold(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                      const FoldSpec& fold, const TfIdfIndex& tfidf, const EvalConfig& config);

struct MetricRow {
    std::string algorithm;
    std::string scenario;
    std::string metric;  // ndcg, ild, msi, seren, ndcg_new, obj
    int k = 0;
    double value = 0;
};

std::vector<MetricRow> evaluate_scenario(const FoldModels& models, const ViewLog& log,
                                         const Catalog& catalog, const WeekClock& clock,
                                         ScenarioKind scenario, const EvalConfig& config);

struct FoldResult {
    std::vector<MetricRow> rows;
    std::vector<double> validation_ndcg;  // per boosting round
};

/// Train the fold's models and evaluate one scenario (the spec-level
/// one-fold entry point; cross_validate shares training across scenarios).
FoldResult evaluate_run(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                        const FoldSpec& fold, ScenarioKind scenario, const TfIdfIndex& tfidf,
                        const EvalConfig& config);

struct CrossValReport {
    std::vector<MetricRow> averaged;                        // report.csv rows
    std::vector<std::pair<int, MetricRow>> per_fold;        // (fold index, row)
    std::vector<std::vector<double>> validation_ndcg_per_fold;
    int n_folds = 0;
};

/// Feedback filtering happens here, once, for everything downstream.
CrossValReport cross_validate(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                              FeedbackSource feedback, const std::vector<ScenarioKind>& scenarios,
                              const EvalConfig& config);

void write_report_csv(const std::string& path, const std::vector<MetricRow>& rows);
void write_fold_csv(const std::string& path, const std::vector<std::pair<int, MetricRow>>& rows);

/// Plain-text tables mirroring the Accuracy / Diversity / Novelty /
/// Serendipity / Accuracy (new) / Global column layout.
std::string render_tables(const CrossValReport& report);

}  // namespace tvrec
