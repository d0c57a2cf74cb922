// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/pipeline.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tvrec/parallel.hpp"

namespace tvrec {

namespace {

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value for " + key + ": '" + v + "'");
    }
}

std::int64_t to_int(const std::string& v, const std::string& key) {
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw std::invalid_argument("bad integer value for " + key + ": '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("bad boolean value for " + key + ": '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void RunSettings::apply(const std::string& key, const std::string& value) {
    if (key == "synth.users") synth.n_users = static_cast<int>(to_int(value, key));
    else if (key == "synth.channels") synth.n_channels = static_cast<int>(to_int(value, key));
    else if (key == "synth.programs_per_week") synth.programs_per_week = static_cast<int>(to_int(value, key));
    else if (key == "synth.weeks") synth.n_weeks = static_cast<int>(to_int(value, key));
    else if (key == "synth.seed") synth.seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "synth.channel_loyalty") synth.channel_loyalty = to_double(value, key);
    else if (key == "synth.category_affinity_concentration") synth.category_affinity_concentration = to_double(value, key);
    else if (key == "synth.series_repeat_prob") synth.series_repeat_prob = to_double(value, key);
    else if (key == "synth.daypart_regularity") synth.daypart_regularity = to_double(value, key);
    else if (key == "synth.catchup_share") synth.catchup_share = to_double(value, key);
    else if (key == "seed") {
        synth.seed = static_cast<std::uint64_t>(to_int(value, key));
        eval.seed = synth.seed;
    } else if (key == "rule") {
        if (value == "fraction") eval.rule = PreferenceRule::fraction_over(0.5);
        else if (value == "minutes") eval.rule = PreferenceRule::minutes_over(10);
        else throw std::invalid_argument("rule must be 'fraction' or 'minutes'");
    } else if (key == "k") {
        eval.ks.clear();
        for (const std::string& part : split(value, ',')) {
            int k = static_cast<int>(to_int(part, key));
            if (k < 1) throw std::invalid_argument("k values must be >= 1");
            eval.ks.push_back(k);
        }
        if (eval.ks.empty()) throw std::invalid_argument("k list must not be empty");
    } else if (key == "objective") {
        std::vector<std::string> parts = split(value, ',');
        if (parts.size() != 4) {
            throw std::invalid_argument("objective must be w_acc,w_div,w_nov,w_ser");
        }
        eval.objective.w_acc = to_double(parts[0], key);
        eval.objective.w_div = to_double(parts[1], key);
        eval.objective.w_nov = to_double(parts[2], key);
        eval.objective.w_ser = to_double(parts[3], key);
        if (eval.objective.w_acc < 0 || eval.objective.w_div < 0 || eval.objective.w_nov < 0 ||
            eval.objective.w_ser < 0) {
            throw std::invalid_argument("objective weights must be nonnegative");
        }
        if (eval.objective.w_acc + eval.objective.w_div + eval.objective.w_nov +
                eval.objective.w_ser <= 0) {
            throw std::invalid_argument("at least one objective weight must be > 0");
        }
    } else if (key == "algorithms") {
        eval.algorithms = split(value, ',');
    } else if (key == "negative_cap") {
        eval.negative_cap = static_cast<int>(to_int(value, key));
    } else if (key == "content_history_cap") {
        eval.content_history_cap = static_cast<int>(to_int(value, key));
    } else if (key == "rerank_pool") {
        eval.rerank_pool = static_cast<int>(to_int(value, key));
    } else if (key == "weekly_reference") {
        eval.weekly_reference = to_bool(value, key);
    } else if (key == "wrmf.factors") {
        eval.wrmf.factors = static_cast<int>(to_int(value, key));
    } else if (key == "wrmf.alpha") {
        eval.wrmf.alpha = to_double(value, key);
    } else if (key == "wrmf.reg") {
        eval.wrmf.reg = to_double(value, key);
    } else if (key == "wrmf.iterations") {
        eval.wrmf.iterations = static_cast<int>(to_int(value, key));
    } else if (key == "wrmf.binary") {
        eval.wrmf.binary_preferences = to_bool(value, key);
    } else if (key == "ltr.rounds") {
        eval.ltr.rounds = static_cast<int>(to_int(value, key));
    } else if (key == "ltr.learning_rate") {
        eval.ltr.learning_rate = to_double(value, key);
    } else if (key == "ltr.max_leaves") {
        eval.ltr.max_leaves = static_cast<int>(to_int(value, key));
    } else if (key == "ltr.min_samples_leaf") {
        eval.ltr.min_samples_leaf = static_cast<int>(to_int(value, key));
    } else if (key == "ltr.truncation_k") {
        eval.ltr.truncation_k = static_cast<int>(to_int(value, key));
    } else if (key == "sgd.factors") {
        eval.sgd.factors = static_cast<int>(to_int(value, key));
    } else if (key == "sgd.learning_rate") {
        eval.sgd.learning_rate = to_double(value, key);
    } else if (key == "sgd.reg") {
        eval.sgd.reg = to_double(value, key);
    } else if (key == "sgd.epochs") {
        eval.sgd.epochs = static_cast<int>(to_int(value, key));
    } else if (key == "feedback") {
        if (value == "live+catchup") feedback = FeedbackSource::LiveAndCatchup;
        else if (value == "catchup-only") feedback = FeedbackSource::CatchupOnly;
        else throw std::invalid_argument("feedback must be 'live+catchup' or 'catchup-only'");
    } else if (key == "scenario") {
        if (value == "live") scenarios = {ScenarioKind::LiveTV};
        else if (value == "catchup") scenarios = {ScenarioKind::CatchUp};
        else if (value == "both") scenarios = {ScenarioKind::LiveTV, ScenarioKind::CatchUp};
        else throw std::invalid_argument("scenario must be 'live', 'catchup' or 'both'");
    } else if (key == "epg") {
        epg_path = value;
    } else if (key == "views") {
        views_path = value;
    } else if (key == "out") {
        out_dir = value;
    } else if (key == "fold") {
        fold_index = static_cast<int>(to_int(value, key));
    } else if (key == "threads") {
        threads = static_cast<int>(to_int(value, key));
    } else {
        throw std::invalid_argument("unknown config key: '" + key + "'");
    }
}

std::string RunSettings::describe() const {
    std::ostringstream out;
    out << "synth.users=" << synth.n_users << "\n";
    out << "synth.channels=" << synth.n_channels << "\n";
    out << "synth.programs_per_week=" << synth.programs_per_week << "\n";
    out << "synth.weeks=" << synth.n_weeks << "\n";
    out << "synth.seed=" << synth.seed << "\n";
    out << "synth.channel_loyalty=" << synth.channel_loyalty << "\n";
    out << "synth.category_affinity_concentration=" << synth.category_affinity_concentration << "\n";
    out << "synth.series_repeat_prob=" << synth.series_repeat_prob << "\n";
    out << "synth.daypart_regularity=" << synth.daypart_regularity << "\n";
    out << "synth.catchup_share=" << synth.catchup_share << "\n";
    out << "seed=" << eval.seed << "\n";
    out << "rule=" << (eval.rule.kind == PreferenceRule::Kind::FractionOver ? "fraction" : "minutes") << "\n";
    out << "k=";
    for (size_t i = 0; i < eval.ks.size(); ++i) out << (i ? "," : "") << eval.ks[i];
    out << "\n";
    out << "objective=" << eval.objective.w_acc << ',' << eval.objective.w_div << ','
        << eval.objective.w_nov << ',' << eval.objective.w_ser << "\n";
    out << "algorithms=";
    for (size_t i = 0; i < eval.algorithms.size(); ++i) out << (i ? "," : "") << eval.algorithms[i];
    out << "\n";
    out << "negative_cap=" << eval.negative_cap << "\n";
    out << "content_history_cap=" << eval.content_history_cap << "\n";
    out << "rerank_pool=" << eval.rerank_pool << "\n";
    out << "weekly_reference=" << (eval.weekly_reference ? "true" : "false") << "\n";
    out << "wrmf.factors=" << eval.wrmf.factors << "\n";
    out << "wrmf.alpha=" << eval.wrmf.alpha << "\n";
    out << "wrmf.reg=" << eval.wrmf.reg << "\n";
    out << "wrmf.iterations=" << eval.wrmf.iterations << "\n";
    out << "wrmf.binary=" << (eval.wrmf.binary_preferences ? "true" : "false") << "\n";
    out << "ltr.rounds=" << eval.ltr.rounds << "\n";
    out << "ltr.learning_rate=" << eval.ltr.learning_rate << "\n";
    out << "ltr.max_leaves=" << eval.ltr.max_leaves << "\n";
    out << "ltr.min_samples_leaf=" << eval.ltr.min_samples_leaf << "\n";
    out << "ltr.truncation_k=" << eval.ltr.truncation_k << "\n";
    out << "sgd.factors=" << eval.sgd.factors << "\n";
    out << "sgd.learning_rate=" << eval.sgd.learning_rate << "\n";
    out << "sgd.reg=" << eval.sgd.reg << "\n";
    out << "sgd.epochs=" << eval.sgd.epochs << "\n";
    out << "feedback=" << to_string(feedback) << "\n";
    out << "scenario=";
    if (scenarios.size() == 2) out << "both";
    else out << to_string(scenarios.front());
    out << "\n";
    if (!epg_path.empty()) out << "epg=" << epg_path << "\n";
    if (!views_path.empty()) out << "views=" << views_path << "\n";
    if (!out_dir.empty()) out << "out=" << out_dir << "\n";
    out << "fold=" << fold_index << "\n";
    out << "threads=" << threads << "\n";
    return out.str();
}

void load_config_file(const std::string& path, RunSettings& settings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        size_t end = line.find_last_not_of(" \t\r");
        std::string trimmed = line.substr(begin, end - begin + 1);
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key=value: '" + trimmed + "'");
        }
        auto strip = [](std::string s) {
            size_t b = s.find_first_not_of(" \t");
            size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        settings.apply(strip(trimmed.substr(0, eq)), strip(trimmed.substr(eq + 1)));
    }
}

IngestSummary summarize_dataset(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                                const PreferenceRule& rule) {
    IngestSummary s;
    s.programs = static_cast<std::int64_t>(catalog.programs.size());
    s.channels = static_cast<std::int64_t>(catalog.channels.size());
    s.airings = static_cast<std::int64_t>(catalog.airings.size());
    s.events = static_cast<std::int64_t>(log.events.size());
    s.dropped_unknown = log.dropped_unknown_program;
    s.dropped_outside_window = log.dropped_outside_window;

    std::set<UserId> users;
    std::set<std::pair<UserId, ProgramId>> user_programs;
    for (const ViewEvent& ev : log.events) {
        users.insert(ev.user);
        user_programs.insert({ev.user, ev.program});
    }
    s.users = static_cast<std::int64_t>(users.size());

    std::vector<Interaction> interactions = build_interactions(log, catalog, rule, clock);
    s.interactions = static_cast<std::int64_t>(interactions.size());
    for (const Interaction& it : interactions) s.positives += it.preference;

    std::set<ProgramId> watched;
    for (const auto& [u, p] : user_programs) watched.insert(p);
    if (s.users > 0) {
        s.avg_programs_per_user =
            static_cast<double>(user_programs.size()) / static_cast<double>(s.users);
    }
    if (!watched.empty()) {
        s.avg_users_per_program =
            static_cast<double>(user_programs.size()) / static_cast<double>(watched.size());
    }
    return s;
}

LoadedData load_dataset(const std::string& epg_path, const std::string& views_path) {
    LoadedData data;
    data.catalog = merge_simulcasts(parse_epg(epg_path));
    data.log = parse_views(views_path, data.catalog);
    data.clock = week_clock_for(data.log);
    return data;
}

PipelineResult run_pipeline(const RunSettings& settings, const std::string& out_dir) {
    if (settings.threads > 0) set_thread_count(settings.threads);
    std::filesystem::create_directories(out_dir);
    PipelineResult result;

    result.synth = synth_generate(settings.synth, out_dir);
    result.files_written = {result.synth.epg_path, result.synth.views_path,
                            result.synth.manifest_path};

    LoadedData data = load_dataset(result.synth.epg_path, result.synth.views_path);
    result.summary = summarize_dataset(data.log, data.catalog, data.clock, settings.eval.rule);

    result.report = cross_validate(data.log, data.catalog, data.clock, settings.feedback,
                                   settings.scenarios, settings.eval);

    std::string report_path = (std::filesystem::path(out_dir) / "report.csv").string();
    std::string folds_path = (std::filesystem::path(out_dir) / "report_folds.csv").string();
    std::string tables_path = (std::filesystem::path(out_dir) / "tables.txt").string();
    std::string config_path = (std::filesystem::path(out_dir) / "run_config.log").string();
    write_report_csv(report_path, result.report.averaged);
    write_fold_csv(folds_path, result.report.per_fold);
    {
        std::ofstream tables(tables_path);
        if (!tables) throw std::runtime_error("cannot write " + tables_path);
        tables << render_tables(result.report);
    }
    {
        std::ofstream config(config_path);
        if (!config) throw std::runtime_error("cannot write " + config_path);
        config << settings.describe();
    }
    result.files_written.push_back(report_path);
    result.files_written.push_back(folds_path);
    result.files_written.push_back(tables_path);
    result.files_written.push_back(config_path);
    return result;
}

}  // namespace tvrec
