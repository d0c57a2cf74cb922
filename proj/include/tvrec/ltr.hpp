// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tvrec {

/// Query-grouped ranking data with binary labels. Documents carry a stable
/// content key (the program id) and queries too (a session hash); tie-breaks
/// and accumulation orders run over those keys, so a fitted model does not
/// depend on query order or document order within a query.
struct RankingDataset {
    size_t num_features = 0;
    std::vector<double> features;  // num_docs x num_features, row-major
    std::vector<int> labels;       // {0,1}
    std::vector<std::uint64_t> doc_keys;
    std::vector<std::uint64_t> query_keys;
    std::vector<size_t> query_offsets{0};  // size num_queries()+1

    size_t num_docs() const { return labels.size(); }
    size_t num_queries() const { return query_offsets.size() - 1; }
    size_t query_size(size_t q) const { return query_offsets[q + 1] - query_offsets[q]; }
    std::span<const double> doc(size_t i) const {
        return {features.data() + i * num_features, num_features};
    }

    void begin_query(std::uint64_t query_key);
    void add_doc(std::span<const double> doc_features, int label, std::uint64_t doc_key);
    /// Drops the open query again if it ended up with fewer than min_docs.
    void end_query(size_t min_docs = 2);
};

struct LtrParams {
    int rounds = 100;
    double learning_rate = 0.1;
    int max_leaves = 10;
    int min_samples_leaf = 50;
    int truncation_k = 10;  // nDCG truncation the lambdas optimize
    std::uint64_t seed = 1;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf value (unscaled Newton step)
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double eval(std::span<const double> features) const;
};

struct GbmModel {
    size_t num_features = 0;
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;

    /// base_score + sum of learning_rate * tree(features).
    /// Throws std::invalid_argument on schema length mismatch.
    double predict(std::span<const double> features) const;

    void save_json(const std::string& path) const;
    static GbmModel load_json(const std::string& path);
};

/// Lambda gradients and hessians for one query.
/// For every pair (i, j) with label_i > label_j:
///   rho    = 1 / (1 + exp(s_i - s_j))                       (sigma = 1)
///   delta  = |ΔnDCG@k of swapping i and j|  (or 1 when unit_delta)
///   lambda_i += rho * delta;          lambda_j -= rho * delta
///   hess_i  += rho * (1-rho) * delta; hess_j  += the same
/// The current ranking orders by (score desc, label desc, key asc).
/// Uniform-label queries produce all-zero outputs. With unit_delta the
/// lambdas equal the negative gradient of the pairwise logistic cost
/// sum log(1 + exp(-(s_i - s_j))).
void compute_query_lambdas(std::span<const double> scores, std::span<const int> labels,
                           std::span<const std::uint64_t> keys, int truncation_k, bool unit_delta,
                           std::span<double> lambdas, std::span<double> hessians);

struct FitReport {
    std::vector<double> validation_ndcg;  // per round, at params.truncation_k
};

/// LambdaMART: per round, compute lambdas on current scores, fit one
/// regression tree to them by greedy variance-reduction splitting (exact
/// splits over sorted distinct values), set leaf values to
/// sum(lambda)/(sum(hessian)+1e-9), and add the tree scaled by learning_rate.
GbmModel ltr_fit(const RankingDataset& train, const RankingDataset& validation,
                 const LtrParams& params, FitReport* report = nullptr);

/// Mean nDCG@k over queries with at least one positive; ranking by
/// (score desc, key asc). Returns 0 when no query qualifies.
double dataset_ndcg_at_k(const RankingDataset& dataset, std::span<const double> scores, int k);

}  // namespace tvrec
