// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvrec/domain.hpp"

namespace tvrec {

struct WrmfParams {
    int factors = 32;
    double alpha = 40.0;
    double reg = 0.1;  // lambda > 0
    int iterations = 15;
    std::uint64_t seed = 1;
    bool binary_preferences = false;  // r_ui = 1 instead of watch counts
};

/// One observed (user, program) cell with its r_ui value (watch count or 1).
struct WatchCount {
    UserId user = 0;
    ProgramId program = 0;
    double r = 1.0;
};

struct MfModel {
    int factors = 0;
    double alpha = 0.0;
    double reg = 0.0;
    std::vector<UserId> users;      // sorted
    std::vector<ProgramId> items;   // sorted
    std::unordered_map<UserId, int> user_index;
    std::unordered_map<ProgramId, int> item_index;
    std::vector<double> user_factors;  // |U| x f, row-major
    std::vector<double> item_factors;  // |I| x f, row-major

    /// Dot product of factor rows; unknown user or item -> 0 (cold start).
    double predict(UserId user, ProgramId program) const;

    void save_json(const std::string& path) const;
    static MfModel load_json(const std::string& path);
};

/// Alternating least squares on the Hu-et-al. weighted objective: confidence
/// c_ui = 1 + alpha * r_ui, preference p_ui = 1 iff r_ui > 0, and unobserved
/// pairs enter with r = 0, c = 1. Each half-sweep solves the regularized
/// normal equations exactly per user (then per item), so the dense loss is
/// non-increasing at every half-sweep. Factors initialize uniform [0, 0.1)
/// from the seed.
/// If loss_per_half_sweep is given it receives the loss after init and after
/// every half-sweep (2 * iterations + 1 values).
MfModel wrmf_fit(const std::vector<WatchCount>& observations, const WrmfParams& params,
                 std::vector<double>* loss_per_half_sweep = nullptr);

/// The full dense objective:
///   sum_ui c_ui (p_ui - x_u . y_i)^2 + reg (sum ||x_u||^2 + sum ||y_i||^2)
/// computed exactly via the Gram-matrix identity, cost proportional to the
/// observed entries.
double wrmf_loss(const MfModel& model, const std::vector<WatchCount>& observations);

/// Half-sweep kernels, exposed for the serial reference comparison and the
/// benchmark. Solves every user (or item) row against the fixed other side.
void wrmf_solve_users(MfModel& model,
                      const std::vector<std::vector<std::pair<int, double>>>& user_obs);
void wrmf_solve_items(MfModel& model,
                      const std::vector<std::vector<std::pair<int, double>>>& item_obs);

}  // namespace tvrec
