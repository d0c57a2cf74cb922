// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <span>
#include <vector>

#include "tvrec/ltr.hpp"
#include "tvrec/wrmf.hpp"

namespace tvrec::ref {

/// Textbook serial ALS half-sweeps: per row, the normal-equation matrix is
/// accumulated over ALL items/users (confidence 1 for unobserved cells)
/// instead of the Gram-matrix decomposition the parallel kernels use.
/// Algebraically identical; used as the independent route in tests and as
/// the serial side of the benchmark.
void als_solve_users_dense(MfModel& model, const std::vector<WatchCount>& observations);
void als_solve_items_dense(MfModel& model, const std::vector<WatchCount>& observations);

/// The weighted objective accumulated cell by cell over the full dense
/// user x item grid. O(|U| * |I| * f); small instances only.
double wrmf_loss_dense(const MfModel& model, const std::vector<WatchCount>& observations);

/// Serial lambda computation that derives each pair's |ΔnDCG| by literally
/// swapping the two documents in the ranking and re-computing DCG@k.
void lambdas_by_swap(std::span<const double> scores, std::span<const int> labels,
                     std::span<const std::uint64_t> keys, int truncation_k, bool unit_delta,
                     std::span<double> lambdas, std::span<double> hessians);

}  // namespace tvrec::ref
