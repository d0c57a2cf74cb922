// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <string>

#include "tvrec/features.hpp"
#include "tvrec/ltr.hpp"

namespace tvrec {

/// SVMlight-style ranking rows: `<label> qid:<query> <idx>:<value> ...`
/// with 1-based feature indices; zero-valued features are omitted. Queries
/// are numbered 1..n in dataset order.
void write_svmlight(const std::string& path, const RankingDataset& dataset);

/// Reads a file written by write_svmlight. Doc keys and query keys are
/// synthesized from positions (the text format does not carry them).
RankingDataset read_svmlight(const std::string& path, size_t num_features);

/// schema.json: {"features": [names...]} in schema order.
void write_schema_json(const std::string& path, const FeatureSchema& schema);

}  // namespace tvrec
