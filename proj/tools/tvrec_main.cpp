// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvrec/eval.hpp"
#include "tvrec/parallel.hpp"
#include "tvrec/pipeline.hpp"
#include "tvrec/svmlight.hpp"
#include "tvrec/synthgen.hpp"

namespace {

using namespace tvrec;

// Tracks files written by a run so a failed run leaves nothing behind.
struct OutputTracker {
    std::vector<std::string> files;
    bool committed = false;

    std::string track(const std::string& path) {
        files.push_back(path);
        return path;
    }
    ~OutputTracker() {
        if (committed) return;
        for (const std::string& f : files) {
            std::error_code ec;
            std::filesystem::remove(f, ec);
        }
    }
};

// Maps CLI flags onto RunSettings keys so flags and config files share one
// validation path; flags override the config file.
struct FlagMap {
    CLI::App* cmd;
    std::string config_path;
    std::vector<std::string> set_overrides;
    std::vector<std::tuple<std::string, std::string, std::shared_ptr<std::string>>> entries;

    explicit FlagMap(CLI::App* app) : cmd(app) {
        cmd->add_option("--config", config_path, "key=value config file; flags override");
        cmd->add_option("--set", set_overrides, "extra key=value override (repeatable)");
    }

    void add(const std::string& flag, const std::string& key, const std::string& desc) {
        auto holder = std::make_shared<std::string>();
        cmd->add_option(flag, *holder, desc);
        entries.emplace_back(flag, key, holder);
    }

    void resolve(RunSettings& settings) const {
        if (!config_path.empty()) load_config_file(config_path, settings);
        for (const auto& [flag, key, holder] : entries) {
            if (cmd->count(flag) > 0) settings.apply(key, *holder);
        }
        for (const std::string& kv : set_overrides) {
            size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            }
            settings.apply(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (settings.out_dir.empty()) {
            if (const char* env = std::getenv("TVREC_OUT")) settings.out_dir = env;
        }
    }
};

void add_common_data_flags(FlagMap& flags) {
    flags.add("--epg", "epg", "EPG CSV file");
    flags.add("--views", "views", "view log JSONL file");
    flags.add("--rule", "rule", "preference rule: fraction | minutes");
    flags.add("--seed", "seed", "root random seed");
    flags.add("--threads", "threads", "worker threads (0 = all)");
}

void write_run_log(OutputTracker& tracker, const RunSettings& settings) {
    std::filesystem::create_directories(settings.out_dir);
    std::string path =
        tracker.track((std::filesystem::path(settings.out_dir) / "run_config.log").string());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << settings.describe();
}

int cmd_synth(const RunSettings& settings_in, OutputTracker& tracker) {
    RunSettings settings = settings_in;
    if (settings.out_dir.empty()) throw std::invalid_argument("synth needs --out (or TVREC_OUT)");
    write_run_log(tracker, settings);
    SynthOutput out = synth_generate(settings.synth, settings.out_dir);
    tracker.track(out.epg_path);
    tracker.track(out.views_path);
    tracker.track(out.manifest_path);
    std::printf("wrote %s (%lld airings), %s (%lld events), %s (%lld programs)\n",
                out.epg_path.c_str(), static_cast<long long>(out.n_airings),
                out.views_path.c_str(), static_cast<long long>(out.n_events),
                out.manifest_path.c_str(), static_cast<long long>(out.n_programs));
    return 0;
}

int cmd_ingest(const RunSettings& settings, OutputTracker& tracker) {
    if (settings.epg_path.empty() || settings.views_path.empty()) {
        throw std::invalid_argument("ingest needs --epg and --views");
    }
    LoadedData data = load_dataset(settings.epg_path, settings.views_path);
    IngestSummary s = summarize_dataset(data.log, data.catalog, data.clock, settings.eval.rule);
    std::printf("users:                 %lld\n", static_cast<long long>(s.users));
    std::printf("programs (canonical):  %lld\n", static_cast<long long>(s.programs));
    std::printf("channels:              %lld\n", static_cast<long long>(s.channels));
    std::printf("airings:               %lld\n", static_cast<long long>(s.airings));
    std::printf("events kept:           %lld\n", static_cast<long long>(s.events));
    std::printf("events dropped:        %lld unknown id, %lld outside window\n",
                static_cast<long long>(s.dropped_unknown),
                static_cast<long long>(s.dropped_outside_window));
    std::printf("interaction records:   %lld (%lld positive)\n",
                static_cast<long long>(s.interactions), static_cast<long long>(s.positives));
    std::printf("avg programs per user: %.1f\n", s.avg_programs_per_user);
    std::printf("avg users per program: %.1f\n", s.avg_users_per_program);
    if (!settings.out_dir.empty()) {
        std::filesystem::create_directories(settings.out_dir);
        std::string path =
            tracker.track((std::filesystem::path(settings.out_dir) / "summary.json").string());
        nlohmann::json j = {
            {"users", s.users},
            {"programs", s.programs},
            {"channels", s.channels},
            {"airings", s.airings},
            {"events", s.events},
            {"dropped_unknown", s.dropped_unknown},
            {"dropped_outside_window", s.dropped_outside_window},
            {"interactions", s.interactions},
            {"positives", s.positives},
            {"avg_programs_per_user", s.avg_programs_per_user},
            {"avg_users_per_program", s.avg_users_per_program},
        };
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << j.dump(2) << "\n";
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_train(const RunSettings& settings, OutputTracker& tracker) {
    if (settings.epg_path.empty() || settings.views_path.empty() || settings.out_dir.empty()) {
        throw std::invalid_argument("train needs --epg, --views and --out");
    }
    if (settings.threads > 0) set_thread_count(settings.threads);
    write_run_log(tracker, settings);
    LoadedData data = load_dataset(settings.epg_path, settings.views_path);
    ViewLog filtered = filter_feedback(data.log, settings.feedback);
    int total_weeks = 0;
    for (const ViewEvent& ev : filtered.events) {
        total_weeks = std::max(total_weeks, data.clock.week_of(ev.watch_start) + 1);
    }
    std::vector<FoldSpec> folds = make_folds(total_weeks);
    if (settings.fold_index < 0 || settings.fold_index >= static_cast<int>(folds.size())) {
        throw std::invalid_argument("fold index out of range (have " +
                                    std::to_string(folds.size()) + " folds)");
    }
    TfIdfIndex tfidf = TfIdfIndex::build(data.catalog, default_stopwords());
    FoldModels models = train_fold(filtered, data.catalog, data.clock,
                                   folds[static_cast<size_t>(settings.fold_index)], tfidf,
                                   settings.eval);

    std::filesystem::path dir(settings.out_dir);
    models.wrmf_algo.save_json(tracker.track((dir / "wrmf.json").string()));
    models.ltr.save_json(tracker.track((dir / "ltr.json").string()));
    write_schema_json(tracker.track((dir / "schema.json").string()), feature_schema());
    write_svmlight(tracker.track((dir / "train.svmlight").string()), models.train_ds);
    write_svmlight(tracker.track((dir / "valid.svmlight").string()), models.valid_ds);
    std::printf("fold %d: %zu train queries (%zu docs), %zu validation queries (%zu docs)\n",
                settings.fold_index, models.train_ds.num_queries(), models.train_ds.num_docs(),
                models.valid_ds.num_queries(), models.valid_ds.num_docs());
    if (!models.fit_report.validation_ndcg.empty()) {
        std::printf("validation nDCG@%d: round 1 %.4f, round %zu %.4f\n",
                    settings.eval.ltr.truncation_k, models.fit_report.validation_ndcg.front(),
                    models.fit_report.validation_ndcg.size(),
                    models.fit_report.validation_ndcg.back());
    }
    return 0;
}

int cmd_evaluate(const RunSettings& settings, OutputTracker& tracker) {
    if (settings.epg_path.empty() || settings.views_path.empty() || settings.out_dir.empty()) {
        throw std::invalid_argument("evaluate needs --epg, --views and --out");
    }
    if (settings.threads > 0) set_thread_count(settings.threads);
    write_run_log(tracker, settings);
    LoadedData data = load_dataset(settings.epg_path, settings.views_path);
    CrossValReport report = cross_validate(data.log, data.catalog, data.clock, settings.feedback,
                                           settings.scenarios, settings.eval);
    std::filesystem::path dir(settings.out_dir);
    write_report_csv(tracker.track((dir / "report.csv").string()), report.averaged);
    write_fold_csv(tracker.track((dir / "report_folds.csv").string()), report.per_fold);
    std::string tables = render_tables(report);
    {
        std::string path = tracker.track((dir / "tables.txt").string());
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << tables;
    }
    std::fputs(tables.c_str(), stdout);
    return 0;
}

int cmd_rerank(const RunSettings& settings, OutputTracker& tracker) {
    if (settings.epg_path.empty() || settings.views_path.empty() || settings.out_dir.empty()) {
        throw std::invalid_argument("rerank needs --epg, --views and --out");
    }
    if (settings.threads > 0) set_thread_count(settings.threads);
    write_run_log(tracker, settings);
    LoadedData data = load_dataset(settings.epg_path, settings.views_path);
    ViewLog filtered = filter_feedback(data.log, settings.feedback);
    int total_weeks = 0;
    for (const ViewEvent& ev : filtered.events) {
        total_weeks = std::max(total_weeks, data.clock.week_of(ev.watch_start) + 1);
    }
    std::vector<FoldSpec> folds = make_folds(total_weeks);
    if (settings.fold_index < 0 || settings.fold_index >= static_cast<int>(folds.size())) {
        throw std::invalid_argument("fold index out of range");
    }
    const FoldSpec& fold = folds[static_cast<size_t>(settings.fold_index)];
    TfIdfIndex tfidf = TfIdfIndex::build(data.catalog, default_stopwords());

    EvalConfig config = settings.eval;
    config.algorithms = {"greedyrec"};
    FoldModels models = train_fold(filtered, data.catalog, data.clock, fold, tfidf, config);

    // Re-ranked lists per target-week session.
    ScenarioKind scenario = settings.scenarios.front();
    std::vector<Session> sessions = user_sessions(filtered, data.clock, fold.target_week);
    std::string path = tracker.track(
        (std::filesystem::path(settings.out_dir) / "rerank.csv").string());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "user,session_utc,rank,program,model_score\n";
    int max_k = *std::max_element(config.ks.begin(), config.ks.end());
    for (const Session& session : sessions) {
        std::vector<Candidate> candidates = scenario == ScenarioKind::LiveTV
                                                ? live_candidates(session.start, data.catalog)
                                                : catchup_candidates(session.start, data.catalog);
        if (candidates.empty()) continue;
        std::vector<FeatureVector> fv;
        RerankContext ctx;
        for (const Candidate& c : candidates) {
            const Program& prog = data.catalog.at(c.program);
            ctx.ids.push_back(c.program);
            ctx.traits.push_back({prog.category, prog.subcategory, c.channel});
            ctx.audience.push_back(models.stats_base.audience_of(c.program));
        }
        ctx.total_users = std::max(1, models.stats_base.total_users);
        if (const UserWindowStats* us = models.stats_base.user(session.user)) {
            for (const auto& [pid, ch] : us->watched_programs) {
                const Program* prog = data.catalog.find(pid);
                if (prog) ctx.user_history.push_back({prog->category, prog->subcategory, ch});
            }
        }
        std::vector<FeatureVector> feats;
        ctx.model_scores.resize(candidates.size());
        {
            auto pit = models.cb_eval.find(session.user);
            const TfIdfIndex::Profile* profile = pit == models.cb_eval.end() ? nullptr : &pit->second;
            for (size_t i = 0; i < candidates.size(); ++i) {
                double cb = profile ? tfidf.score_profile(candidates[i].program, *profile) : 0.0;
                CfScores cf{models.wrmf_feat_eval.predict(session.user, candidates[i].program),
                            models.sgd_feat_eval.predict(session.user, candidates[i].program)};
                FeatureVector v = extract_features(session.user, candidates[i], session.start,
                                                   models.stats_eval, data.catalog, cb, cf);
                ctx.model_scores[i] = models.ltr.predict(v.values);
            }
        }
        ObjectiveSpec spec = config.objective;
        spec.k = max_k;
        std::vector<int> picks = greedy_rec(spec, ctx);
        for (size_t r = 0; r < picks.size(); ++r) {
            size_t idx = static_cast<size_t>(picks[r]);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", ctx.model_scores[idx]);
            out << session.user << ',' << format_rfc3339(session.start) << ',' << (r + 1) << ','
                << ctx.ids[idx] << ',' << buf << "\n";
        }
    }
    std::printf("wrote %s (%zu sessions)\n", path.c_str(), sessions.size());
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open " + in_path);
    std::string header;
    if (!std::getline(in, header) || header != "algorithm,scenario,metric,k,value") {
        throw std::runtime_error("not a report.csv (bad header): " + in_path);
    }
    CrossValReport report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        if (parts.size() != 5) throw std::runtime_error("malformed report row: " + line);
        report.averaged.push_back(
            {parts[0], parts[1], parts[2], std::stoi(parts[3]), std::stod(parts[4])});
    }
    std::string tables = render_tables(report);
    if (out_path.empty()) {
        std::fputs(tables.c_str(), stdout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << tables;
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Live & Catch-up TV recommendation experiments"};
    app.require_subcommand(1);

    RunSettings settings;

    auto* synth = app.add_subcommand("synth", "generate a synthetic EPG + view log");
    FlagMap synth_flags(synth);
    synth_flags.add("--out", "out", "output directory");
    synth_flags.add("--seed", "seed", "root random seed");
    synth_flags.add("--users", "synth.users", "number of users");
    synth_flags.add("--channels", "synth.channels", "number of channels");
    synth_flags.add("--programs-per-week", "synth.programs_per_week", "programs introduced per week");
    synth_flags.add("--weeks", "synth.weeks", "number of weeks");
    synth_flags.add("--channel-loyalty", "synth.channel_loyalty", "loyalty knob [0,1]");
    synth_flags.add("--affinity-concentration", "synth.category_affinity_concentration",
                    "category taste sharpness > 0");
    synth_flags.add("--series-repeat", "synth.series_repeat_prob", "weekly routine repeat prob");
    synth_flags.add("--daypart-regularity", "synth.daypart_regularity", "habit day-part prob");
    synth_flags.add("--catchup-share", "synth.catchup_share", "share of catch-up events");

    auto* ingest = app.add_subcommand("ingest", "parse and summarize a dataset");
    FlagMap ingest_flags(ingest);
    add_common_data_flags(ingest_flags);
    ingest_flags.add("--out", "out", "optional directory for summary.json");

    auto* train = app.add_subcommand("train", "train all models on one fold");
    FlagMap train_flags(train);
    add_common_data_flags(train_flags);
    train_flags.add("--out", "out", "output directory");
    train_flags.add("--fold", "fold", "fold index (0-based)");
    train_flags.add("--feedback", "feedback", "live+catchup | catchup-only");
    train_flags.add("--negative-cap", "negative_cap", "training negatives per query (0 = all)");

    auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation");
    FlagMap eval_flags(evaluate);
    add_common_data_flags(eval_flags);
    eval_flags.add("--out", "out", "output directory");
    eval_flags.add("--scenario", "scenario", "live | catchup | both");
    eval_flags.add("--feedback", "feedback", "live+catchup | catchup-only");
    eval_flags.add("--k", "k", "comma-separated list sizes");
    eval_flags.add("--objective", "objective", "w_acc,w_div,w_nov,w_ser");
    eval_flags.add("--rerank-pool", "rerank_pool", "GreedyRec pool size (0 = all candidates)");
    eval_flags.add("--weekly-reference", "weekly_reference", "true: one reference point per user");
    eval_flags.add("--algorithms", "algorithms", "comma-separated algorithm list");

    auto* rerank = app.add_subcommand("rerank", "write re-ranked lists for an objective");
    FlagMap rerank_flags(rerank);
    add_common_data_flags(rerank_flags);
    rerank_flags.add("--out", "out", "output directory");
    rerank_flags.add("--objective", "objective", "w_acc,w_div,w_nov,w_ser");
    rerank_flags.add("--scenario", "scenario", "live | catchup");
    rerank_flags.add("--fold", "fold", "fold index (0-based)");
    rerank_flags.add("--rerank-pool", "rerank_pool", "pool size (0 = all candidates)");
    rerank_flags.add("--feedback", "feedback", "live+catchup | catchup-only");

    auto* report = app.add_subcommand("report", "render tables from a report.csv");
    std::string report_in, report_out;
    report->add_option("--in", report_in, "report.csv path")->required();
    report->add_option("--out", report_out, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    OutputTracker tracker;
    try {
        int rc = 1;
        if (synth->parsed()) {
            synth_flags.resolve(settings);
            rc = cmd_synth(settings, tracker);
        } else if (ingest->parsed()) {
            ingest_flags.resolve(settings);
            rc = cmd_ingest(settings, tracker);
        } else if (train->parsed()) {
            train_flags.resolve(settings);
            rc = cmd_train(settings, tracker);
        } else if (evaluate->parsed()) {
            eval_flags.resolve(settings);
            rc = cmd_evaluate(settings, tracker);
        } else if (rerank->parsed()) {
            rerank_flags.resolve(settings);
            rc = cmd_rerank(settings, tracker);
        } else if (report->parsed()) {
            rc = cmd_report(report_in, report_out);
        }
        if (rc == 0) tracker.committed = true;
        return rc;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
