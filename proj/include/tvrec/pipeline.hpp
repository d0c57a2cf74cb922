// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tvrec/eval.hpp"
#include "tvrec/synthgen.hpp"

namespace tvrec {

/// The full resolved configuration of a run; every subcommand consumes a
/// subset. Parsed from key=value config files and/or CLI flags; unknown keys
/// are rejected.
struct RunSettings {
    SynthParams synth;
    EvalConfig eval;
    FeedbackSource feedback = FeedbackSource::LiveAndCatchup;
    std::vector<ScenarioKind> scenarios = {ScenarioKind::LiveTV, ScenarioKind::CatchUp};
    std::string epg_path;
    std::string views_path;
    std::string out_dir;
    int fold_index = 0;  // train/rerank subcommands
    int threads = 0;     // 0 = library default

    /// Applies `key=value`; throws std::invalid_argument on unknown keys or
    /// bad values.
    void apply(const std::string& key, const std::string& value);

    /// Key=value lines, one per key, in a fixed order (the run log).
    std::string describe() const;
};

/// Key=value file, # comments and blank lines allowed.
void load_config_file(const std::string& path, RunSettings& settings);

struct IngestSummary {
    std::int64_t users = 0;
    std::int64_t programs = 0;   // canonical, after simulcast merging
    std::int64_t channels = 0;
    std::int64_t airings = 0;
    std::int64_t events = 0;
    std::int64_t dropped_unknown = 0;
    std::int64_t dropped_outside_window = 0;
    std::int64_t interactions = 0;  // (user, program, week) records
    std::int64_t positives = 0;
    double avg_programs_per_user = 0;
    double avg_users_per_program = 0;
};

IngestSummary summarize_dataset(const ViewLog& log, const Catalog& catalog, const WeekClock& clock,
                                const PreferenceRule& rule);

struct LoadedData {
    Catalog catalog;
    ViewLog log;
    WeekClock clock;
};

/// parse_epg + merge_simulcasts + parse_views + week clock.
LoadedData load_dataset(const std::string& epg_path, const std::string& views_path);

struct PipelineResult {
    SynthOutput synth;
    IngestSummary summary;
    CrossValReport report;
    std::vector<std::string> files_written;
};

/// synth -> ingest -> train all algorithms -> cross-validated evaluation of
/// the configured scenarios. Writes epg.csv, views.jsonl, manifest.json,
/// report.csv, report_folds.csv, tables.txt and run_config.log to out_dir.
/// Byte-reproducible under a fixed seed.
PipelineResult run_pipeline(const RunSettings& settings, const std::string& out_dir);

}  // namespace tvrec
