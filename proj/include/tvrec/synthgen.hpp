// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tvrec/domain.hpp"

namespace tvrec {

/// Knobs for the synthetic EPG + view-log generator. Output is byte-identical
/// under a fixed seed.
struct SynthParams {
    int n_users = 500;
    int n_channels = 20;
    int programs_per_week = 200;
    int n_weeks = 10;
    std::uint64_t seed = 7;

    double channel_loyalty = 0.7;              // P(event lands on the user's primary channel)
    double category_affinity_concentration = 2.0;  // sharpness of per-user category taste
    double series_repeat_prob = 0.85;          // P(routine series watched in a given week)
    double daypart_regularity = 0.8;           // P(session at the user's habitual day-part)
    double catchup_share = 0.25;               // P(event is a catch-up view)

    // Program category mix (normalized internally).
    std::array<double, 8> category_weights = {0.16, 0.22, 0.14, 0.10, 0.10, 0.12, 0.12, 0.04};

    void validate() const;  // throws std::invalid_argument
};

struct SynthOutput {
    std::string epg_path;
    std::string views_path;
    std::string manifest_path;
    std::int64_t n_programs = 0;  // including simulcast twins
    std::int64_t n_airings = 0;
    std::int64_t n_events = 0;
};

/// Writes epg.csv, views.jsonl and manifest.json into out_dir.
/// Schedules start on a Monday 00:00 UTC; per-channel weekly grids carry
/// weekly series, one-shot programs, reruns, and simulcast SD/HD twins for
/// 5% of programs. Users follow latent profiles (favorite channels, category
/// affinity, day-part habit, weekly routine) recorded in the manifest.
SynthOutput synth_generate(const SynthParams& params, const std::string& out_dir);

}  // namespace tvrec
