// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tvrec/eval.hpp"
#include "tvrec/pipeline.hpp"
#include "tvrec/svmlight.hpp"
#include "tvrec/synthgen.hpp"

using namespace tvrec;

namespace {

constexpr Timestamp kWeek0 = 1767571200;  // Monday 2026-01-05

std::string temp_dir(const std::string& name) {
    std::string dir = (std::filesystem::temp_directory_path() / name).string();
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Shared tiny synthetic dataset for the heavier checks.
struct SmallWorld {
    std::string dir;
    LoadedData data;

    SmallWorld() {
        SynthParams p;
        p.n_users = 50;
        p.n_channels = 6;
        p.programs_per_week = 48;
        p.n_weeks = 7;
        p.seed = 12;
        dir = temp_dir("tvrec_eval_world");
        SynthOutput out = synth_generate(p, dir);
        data = load_dataset(out.epg_path, out.views_path);
    }
    ~SmallWorld() { std::filesystem::remove_all(dir); }
};

EvalConfig fast_config() {
    EvalConfig config;
    config.ltr.rounds = 15;
    config.ltr.min_samples_leaf = 10;
    config.wrmf.factors = 8;
    config.wrmf.iterations = 5;
    config.sgd.epochs = 5;
    config.negative_cap = 20;
    return config;
}

}  // namespace

TEST_CASE("make_folds follows the sliding 6-week protocol") {
    std::vector<FoldSpec> folds = make_folds(10);
    REQUIRE(folds.size() == 5);
    CHECK(folds[0].history_weeks == std::array<int, 4>{0, 1, 2, 3});
    CHECK(folds[0].train_label_week == 4);
    CHECK(folds[0].target_week == 5);
    CHECK(folds[4].history_weeks == std::array<int, 4>{4, 5, 6, 7});
    CHECK(folds[4].target_week == 9);

    CHECK(make_folds(6).size() == 1);
    CHECK_THROWS_AS(make_folds(5), std::invalid_argument);
}

TEST_CASE("live candidates contain exactly the airing interval around t") {
    Catalog c;
    Program p;
    p.id = 1;
    p.duration_s = 3600;
    p.episode_count = 0;
    c.programs.emplace(1, p);
    p.id = 2;
    c.programs.emplace(2, p);
    c.airings.push_back({1, 1, kWeek0 + 1000, kWeek0 + 4600});
    c.airings.push_back({2, 2, kWeek0 + 5000, kWeek0 + 8600});
    c.max_airing_seconds = 3600;

    auto now = live_candidates(kWeek0 + 2000, c);
    REQUIRE(now.size() == 1);
    CHECK(now[0].program == 1);

    CHECK(live_candidates(kWeek0 + 4600, c).empty());  // gap between airings
    auto boundary = live_candidates(kWeek0 + 5000, c);
    REQUIRE(boundary.size() == 1);
    CHECK(boundary[0].program == 2);  // start inclusive, end exclusive
}

TEST_CASE("catchup candidates span the 7-day availability window") {
    Catalog c;
    Program p;
    p.id = 1;
    p.duration_s = 3600;
    c.programs.emplace(1, p);
    p.id = 2;
    c.programs.emplace(2, p);
    p.id = 3;
    c.programs.emplace(3, p);
    Timestamp t = kWeek0 + 10 * kSecondsPerDay;
    c.airings.push_back({1, 1, t - 6 * kSecondsPerDay, t - 6 * kSecondsPerDay + 3600});
    c.airings.push_back({2, 2, t - 8 * kSecondsPerDay, t - 8 * kSecondsPerDay + 3600});
    c.airings.push_back({3, 3, t - 600, t + 3000});  // airing right now
    std::sort(c.airings.begin(), c.airings.end(),
              [](const Airing& a, const Airing& b) { return a.start < b.start; });
    c.max_airing_seconds = 3600;

    auto cands = catchup_candidates(t, c);
    std::set<ProgramId> ids;
    for (const Candidate& cand : cands) ids.insert(cand.program);
    CHECK(ids == std::set<ProgramId>{1, 3});  // 6 days ago in, 8 days ago out, live in

    // Live candidates are a subset of catch-up candidates at the same time.
    for (const Candidate& lc : live_candidates(t, c)) CHECK(ids.count(lc.program) == 1);
}

TEST_CASE("candidate sets carry one entry per program after simulcast merge") {
    Catalog c;
    Program p;
    p.id = 1;
    p.duration_s = 3600;
    c.programs.emplace(1, p);
    c.airings.push_back({1, 1, kWeek0, kWeek0 + 3600});
    c.airings.push_back({1, 101, kWeek0, kWeek0 + 3600});  // HD twin airing, same program
    c.max_airing_seconds = 3600;
    auto cands = live_candidates(kWeek0 + 10, c);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].channel == 1);  // lowest channel represents the program
}

TEST_CASE("sessions split on 30-minute gaps and sort by user") {
    ViewLog log;
    auto ev = [&](UserId u, Timestamp t, std::int64_t watched) {
        ViewEvent e;
        e.user = u;
        e.watch_start = t;
        e.watched_seconds = watched;
        e.program = 1;
        log.events.push_back(e);
    };
    ev(1, kWeek0 + 1000, 3000);       // session A
    ev(1, kWeek0 + 4100, 1000);       // gap 100s: same session
    ev(1, kWeek0 + 20000, 500);       // big gap: session B
    ev(2, kWeek0 + 1000, 100);        // user 2, own session
    WeekClock clock{kWeek0};
    std::vector<Session> sessions = user_sessions(log, clock, 0);
    REQUIRE(sessions.size() == 3);
    CHECK(sessions[0].user == 1);
    CHECK(sessions[0].start == kWeek0 + 1000);
    CHECK(sessions[1].start == kWeek0 + 20000);
    CHECK(sessions[2].user == 2);

    CHECK(user_sessions(log, clock, 3).empty());
}

TEST_CASE("feedback filter keeps only catch-up events") {
    ViewLog log;
    ViewEvent a;
    a.user = 1;
    a.mode = ViewMode::Live;
    ViewEvent b;
    b.user = 2;
    b.mode = ViewMode::CatchUp;
    log.events = {a, b};
    ViewLog filtered = filter_feedback(log, FeedbackSource::CatchupOnly);
    REQUIRE(filtered.events.size() == 1);
    CHECK(filtered.events[0].user == 2);
    CHECK(filter_feedback(log, FeedbackSource::LiveAndCatchup).events.size() == 2);
}

TEST_CASE("evaluate_run produces a full metric table on a small world") {
    SmallWorld world;
    EvalConfig config = fast_config();
    std::vector<FoldSpec> folds = make_folds(7);
    TfIdfIndex tfidf = TfIdfIndex::build(world.data.catalog, default_stopwords());

    FoldResult result = evaluate_run(world.data.log, world.data.catalog, world.data.clock,
                                     folds[0], ScenarioKind::CatchUp, tfidf, config);
    // 7 algorithms x 6 metrics x 2 ks
    CHECK(result.rows.size() == 7 * 6 * 2);
    for (const MetricRow& row : result.rows) {
        CHECK(row.value >= 0.0);
        CHECK(row.value <= 1.0);
        CHECK(row.scenario == "catchup");
    }
    CHECK_FALSE(result.validation_ndcg.empty());

    // popular is unpersonalized, random is near zero accuracy on big pools
    auto value_of = [&](const std::string& alg, const std::string& metric, int k) {
        for (const MetricRow& row : result.rows) {
            if (row.algorithm == alg && row.metric == metric && row.k == k) return row.value;
        }
        return -1.0;
    };
    CHECK(value_of("userpopular", "ndcg", 5) > value_of("random", "ndcg", 5));
    CHECK(value_of("userpopular", "ndcg_new", 5) == 0.0);
}

TEST_CASE("anti-leakage: deleting target-week events leaves the training set identical") {
    SmallWorld world;
    EvalConfig config = fast_config();
    config.ltr.rounds = 3;
    std::vector<FoldSpec> folds = make_folds(7);
    const FoldSpec& fold = folds[0];
    TfIdfIndex tfidf = TfIdfIndex::build(world.data.catalog, default_stopwords());

    FoldModels with_target = train_fold(world.data.log, world.data.catalog, world.data.clock,
                                        fold, tfidf, config);

    ViewLog truncated;
    for (const ViewEvent& ev : world.data.log.events) {
        if (world.data.clock.week_of(ev.watch_start) != fold.target_week) {
            truncated.events.push_back(ev);
        }
    }
    FoldModels without_target = train_fold(truncated, world.data.catalog, world.data.clock, fold,
                                           tfidf, config);

    std::string a = (std::filesystem::temp_directory_path() / "tvrec_leak_a.svmlight").string();
    std::string b = (std::filesystem::temp_directory_path() / "tvrec_leak_b.svmlight").string();
    write_svmlight(a, with_target.train_ds);
    write_svmlight(b, without_target.train_ds);
    CHECK(slurp(a) == slurp(b));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST_CASE("cross_validate is deterministic and covers both scenarios") {
    SmallWorld world;
    EvalConfig config = fast_config();
    config.ltr.rounds = 5;

    CrossValReport r1 = cross_validate(world.data.log, world.data.catalog, world.data.clock,
                                       FeedbackSource::LiveAndCatchup,
                                       {ScenarioKind::LiveTV, ScenarioKind::CatchUp}, config);
    CrossValReport r2 = cross_validate(world.data.log, world.data.catalog, world.data.clock,
                                       FeedbackSource::LiveAndCatchup,
                                       {ScenarioKind::LiveTV, ScenarioKind::CatchUp}, config);
    REQUIRE(r1.averaged.size() == r2.averaged.size());
    for (size_t i = 0; i < r1.averaged.size(); ++i) {
        CHECK(r1.averaged[i].algorithm == r2.averaged[i].algorithm);
        CHECK(r1.averaged[i].value == r2.averaged[i].value);
    }
    CHECK(r1.n_folds == 2);  // 7 weeks -> 2 folds

    std::set<std::string> scenarios;
    for (const MetricRow& row : r1.averaged) scenarios.insert(row.scenario);
    CHECK(scenarios == std::set<std::string>{"live", "catchup"});

    // single-scenario run equals the corresponding slice
    CrossValReport live_only =
        cross_validate(world.data.log, world.data.catalog, world.data.clock,
                       FeedbackSource::LiveAndCatchup, {ScenarioKind::LiveTV}, config);
    for (const MetricRow& row : live_only.averaged) {
        bool found = false;
        for (const MetricRow& other : r1.averaged) {
            if (other.scenario == row.scenario && other.algorithm == row.algorithm &&
                other.metric == row.metric && other.k == row.k) {
                CHECK(other.value == row.value);
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("report csv round trips through the table renderer") {
    CrossValReport report;
    report.averaged.push_back({"random", "live", "ndcg", 5, 0.002});
    report.averaged.push_back({"random", "live", "ild", 5, 0.919});
    std::string path = (std::filesystem::temp_directory_path() / "tvrec_report_rt.csv").string();
    write_report_csv(path, report.averaged);
    std::string content = slurp(path);
    CHECK(content.find("algorithm,scenario,metric,k,value") == 0);
    CHECK(content.find("random,live,ndcg,5,0.002000") != std::string::npos);
    std::string tables = render_tables(report);
    CHECK(tables.find("Random") != std::string::npos);
    CHECK(tables.find("0.002") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("config keys apply and unknown keys are rejected") {
    RunSettings settings;
    settings.apply("synth.users", "123");
    CHECK(settings.synth.n_users == 123);
    settings.apply("objective", "1,0,0,0");
    CHECK(settings.eval.objective.w_acc == 1.0);
    CHECK(settings.eval.objective.w_div == 0.0);
    settings.apply("k", "3,7");
    CHECK(settings.eval.ks == std::vector<int>{3, 7});
    settings.apply("feedback", "catchup-only");
    CHECK(settings.feedback == FeedbackSource::CatchupOnly);
    settings.apply("rule", "minutes");
    CHECK(settings.eval.rule.kind == PreferenceRule::Kind::MinutesOver);

    CHECK_THROWS_AS(settings.apply("nope", "1"), std::invalid_argument);
    CHECK_THROWS_AS(settings.apply("synth.users", "abc"), std::invalid_argument);
    CHECK_THROWS_AS(settings.apply("objective", "1,2"), std::invalid_argument);
    CHECK_THROWS_AS(settings.apply("objective", "0,0,0,0"), std::invalid_argument);
}

TEST_CASE("config files parse with comments and override order") {
    std::string path = (std::filesystem::temp_directory_path() / "tvrec_cfg.txt").string();
    {
        std::ofstream out(path);
        out << "# a comment\n";
        out << "synth.users = 77\n";
        out << "seed=9\n";
        out << "\n";
    }
    RunSettings settings;
    load_config_file(path, settings);
    CHECK(settings.synth.n_users == 77);
    CHECK(settings.synth.seed == 9);
    CHECK(settings.eval.seed == 9);
    std::filesystem::remove(path);
}

TEST_CASE("svmlight files round trip") {
    RankingDataset data;
    data.begin_query(1);
    data.add_doc(std::vector<double>{0.5, 0.0, 2.0}, 1, 10);
    data.add_doc(std::vector<double>{0.0, 1.0, 0.0}, 0, 11);
    data.end_query();
    data.begin_query(2);
    data.add_doc(std::vector<double>{1.0, 1.0, 1.0}, 0, 12);
    data.add_doc(std::vector<double>{0.25, 0.0, 0.125}, 1, 13);
    data.end_query();

    std::string path = (std::filesystem::temp_directory_path() / "tvrec_svm_rt.txt").string();
    write_svmlight(path, data);
    RankingDataset loaded = read_svmlight(path, 3);
    REQUIRE(loaded.num_queries() == 2);
    REQUIRE(loaded.num_docs() == 4);
    CHECK(loaded.labels == data.labels);
    for (size_t d = 0; d < data.num_docs(); ++d) {
        for (size_t f = 0; f < 3; ++f) {
            CHECK(loaded.doc(d)[f] == data.doc(d)[f]);
        }
    }
    std::filesystem::remove(path);
}
