// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "tvrec/parallel.hpp"

namespace tvrec {

void RankingDataset::begin_query(std::uint64_t query_key) {
    query_keys.push_back(query_key);
    query_offsets.push_back(query_offsets.back());
}

void RankingDataset::add_doc(std::span<const double> doc_features, int label,
                             std::uint64_t doc_key) {
    if (num_features == 0) num_features = doc_features.size();
    if (doc_features.size() != num_features) {
        throw std::invalid_argument("document feature length mismatch");
    }
    features.insert(features.end(), doc_features.begin(), doc_features.end());
    labels.push_back(label);
    doc_keys.push_back(doc_key);
    ++query_offsets.back();
}

void RankingDataset::end_query(size_t min_docs) {
    size_t size = query_offsets.back() - query_offsets[query_offsets.size() - 2];
    if (size < min_docs) {
        features.resize((query_offsets.back() - size) * num_features);
        labels.resize(labels.size() - size);
        doc_keys.resize(doc_keys.size() - size);
        query_offsets.pop_back();
        query_keys.pop_back();
    }
}

namespace {

double discount(size_t position_1based, int k) {
    if (static_cast<int>(position_1based) > k) return 0.0;
    return 1.0 / std::log2(static_cast<double>(position_1based) + 1.0);
}

double ideal_dcg(size_t num_positives, int k) {
    double idcg = 0;
    size_t limit = std::min<size_t>(num_positives, static_cast<size_t>(k));
    for (size_t p = 1; p <= limit; ++p) idcg += discount(p, k);
    return idcg;
}

}  // namespace

void compute_query_lambdas(std::span<const double> scores, std::span<const int> labels,
                           std::span<const std::uint64_t> keys, int truncation_k, bool unit_delta,
                           std::span<double> lambdas, std::span<double> hessians) {
    const size_t n = scores.size();
    std::fill(lambdas.begin(), lambdas.end(), 0.0);
    std::fill(hessians.begin(), hessians.end(), 0.0);

    size_t num_positives = 0;
    for (size_t i = 0; i < n; ++i) num_positives += labels[i] > 0 ? 1 : 0;
    if (num_positives == 0 || num_positives == n) return;  // uniform labels

    // Process documents in key order so the accumulated floating-point sums
    // do not depend on the input permutation.
    std::vector<size_t> by_key(n);
    std::iota(by_key.begin(), by_key.end(), 0);
    std::sort(by_key.begin(), by_key.end(), [&](size_t a, size_t b) { return keys[a] < keys[b]; });

    std::vector<size_t> ranking = by_key;
    std::stable_sort(ranking.begin(), ranking.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return labels[a] > labels[b];
    });
    std::vector<size_t> position(n);  // 1-based
    for (size_t r = 0; r < n; ++r) position[ranking[r]] = r + 1;

    double idcg = ideal_dcg(num_positives, truncation_k);

    for (size_t a = 0; a < n; ++a) {
        size_t i = by_key[a];
        if (labels[i] <= 0) continue;
        for (size_t b = 0; b < n; ++b) {
            size_t j = by_key[b];
            if (labels[j] > 0) continue;
            double rho = 1.0 / (1.0 + std::exp(scores[i] - scores[j]));
            double delta = 1.0;
            if (!unit_delta) {
                delta = std::fabs(discount(position[i], truncation_k) -
                                  discount(position[j], truncation_k)) /
                        idcg;
            }
            double l = rho * delta;
            double h = rho * (1.0 - rho) * delta;
            lambdas[i] += l;
            lambdas[j] -= l;
            hessians[i] += h;
            hessians[j] += h;
        }
    }
}

double RegressionTree::eval(std::span<const double> features) const {
    int node = 0;
    while (nodes[static_cast<size_t>(node)].feature >= 0) {
        const TreeNode& t = nodes[static_cast<size_t>(node)];
        node = features[static_cast<size_t>(t.feature)] <= t.threshold ? t.left : t.right;
    }
    return nodes[static_cast<size_t>(node)].value;
}

double GbmModel::predict(std::span<const double> features) const {
    if (features.size() != num_features) {
        throw std::invalid_argument("feature vector length " + std::to_string(features.size()) +
                                    " does not match model schema " + std::to_string(num_features));
    }
    double score = base_score;
    for (const RegressionTree& tree : trees) score += learning_rate * tree.eval(features);
    return score;
}

namespace {

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool valid() const { return feature >= 0; }

    // Higher gain wins; ties prefer lower feature index, then lower threshold.
    bool better_than(const BestSplit& other) const {
        if (!valid()) return false;
        if (!other.valid()) return true;
        if (gain != other.gain) return gain > other.gain;
        if (feature != other.feature) return feature < other.feature;
        return threshold < other.threshold;
    }
};

struct OpenNode {
    int node_id = 0;
    // Per feature, the node's docs sorted by (value, doc key, query key).
    std::vector<std::vector<int>> sorted_docs;
    double sum_lambda = 0;
    double sum_hessian = 0;
    BestSplit best;
};

constexpr double kMinGain = 1e-12;
constexpr double kHessianGuard = 1e-9;

// Best variance-reduction split of one node for one feature. `values[t]`
// is the feature value of `docs[t]` (already sorted ascending).
BestSplit scan_feature(const std::vector<int>& docs, const std::vector<double>& values,
                       const std::vector<double>& lambdas, int feature, int min_samples_leaf,
                       double total_sum) {
    BestSplit best;
    const size_t n = docs.size();
    if (n < 2 * static_cast<size_t>(min_samples_leaf)) return best;
    double parent_score = total_sum * total_sum / static_cast<double>(n);

    double left_sum = 0;
    for (size_t t = 0; t + 1 < n; ++t) {
        left_sum += lambdas[static_cast<size_t>(docs[t])];
        if (values[t] == values[t + 1]) continue;  // splits only between distinct values
        size_t n_left = t + 1;
        size_t n_right = n - n_left;
        if (n_left < static_cast<size_t>(min_samples_leaf) ||
            n_right < static_cast<size_t>(min_samples_leaf)) {
            continue;
        }
        double right_sum = total_sum - left_sum;
        double gain = left_sum * left_sum / static_cast<double>(n_left) +
                      right_sum * right_sum / static_cast<double>(n_right) - parent_score;
        BestSplit split{gain, feature, values[t] + 0.5 * (values[t + 1] - values[t])};
        if (gain > kMinGain && split.better_than(best)) best = split;
    }
    return best;
}

// Feature-major copy of the matrix; tree scans gather within one contiguous
// per-feature array instead of striding across rows.
std::vector<double> transpose_features(const RankingDataset& data) {
    std::vector<double> t(data.features.size());
    const size_t n = data.num_docs();
    par_for(data.num_features, [&](size_t f) {
        for (size_t d = 0; d < n; ++d) {
            t[f * n + d] = data.features[d * data.num_features + f];
        }
    });
    return t;
}

void compute_node_best(OpenNode& node, const RankingDataset& data,
                       const std::vector<double>& transposed,
                       const std::vector<double>& lambdas, int min_samples_leaf) {
    const int num_features = static_cast<int>(data.num_features);
    const size_t n = data.num_docs();
    std::vector<BestSplit> per_feature(static_cast<size_t>(num_features));
    par_for(static_cast<size_t>(num_features), [&](size_t f) {
        const std::vector<int>& docs = node.sorted_docs[f];
        const double* column = transposed.data() + f * n;
        std::vector<double> values(docs.size());
        for (size_t t = 0; t < docs.size(); ++t) {
            values[t] = column[static_cast<size_t>(docs[t])];
        }
        per_feature[f] = scan_feature(docs, values, lambdas, static_cast<int>(f), min_samples_leaf,
                                      node.sum_lambda);
    });
    node.best = BestSplit{};
    for (const BestSplit& s : per_feature) {
        if (s.better_than(node.best)) node.best = s;
    }
}

RegressionTree fit_tree(const RankingDataset& data, const std::vector<double>& transposed,
                        const std::vector<double>& lambdas, const std::vector<double>& hessians,
                        const std::vector<std::vector<int>>& root_sorted, const LtrParams& params,
                        std::vector<int>& leaf_of_doc) {
    RegressionTree tree;
    std::vector<std::uint8_t> go_left(data.num_docs(), 0);

    OpenNode root;
    root.node_id = 0;
    root.sorted_docs = root_sorted;
    for (int d : root_sorted[0]) {
        root.sum_lambda += lambdas[static_cast<size_t>(d)];
        root.sum_hessian += hessians[static_cast<size_t>(d)];
    }
    tree.nodes.push_back(TreeNode{});
    compute_node_best(root, data, transposed, lambdas, params.min_samples_leaf);

    std::vector<OpenNode> open;
    open.push_back(std::move(root));
    int num_leaves = 1;

    while (num_leaves < params.max_leaves) {
        // Best-first: the open leaf with the strongest split expands next.
        int pick = -1;
        for (size_t i = 0; i < open.size(); ++i) {
            if (!open[i].best.valid()) continue;
            if (pick < 0 || open[i].best.better_than(open[static_cast<size_t>(pick)].best) ||
                (!open[static_cast<size_t>(pick)].best.better_than(open[i].best) &&
                 open[i].node_id < open[static_cast<size_t>(pick)].node_id)) {
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) break;

        OpenNode node = std::move(open[static_cast<size_t>(pick)]);
        open.erase(open.begin() + pick);

        OpenNode left, right;
        left.node_id = static_cast<int>(tree.nodes.size());
        right.node_id = left.node_id + 1;
        const int num_features = static_cast<int>(data.num_features);
        left.sorted_docs.resize(static_cast<size_t>(num_features));
        right.sorted_docs.resize(static_cast<size_t>(num_features));
        const int sf = node.best.feature;
        const double thr = node.best.threshold;
        // Resolve the split once per document, then partition every
        // per-feature list by the flag.
        {
            const double* column = transposed.data() + static_cast<size_t>(sf) * data.num_docs();
            for (int d : node.sorted_docs[static_cast<size_t>(sf)]) {
                go_left[static_cast<size_t>(d)] = column[static_cast<size_t>(d)] <= thr ? 1 : 0;
            }
        }
        par_for(static_cast<size_t>(num_features), [&](size_t f) {
            const std::vector<int>& docs = node.sorted_docs[f];
            std::vector<int>& l = left.sorted_docs[f];
            std::vector<int>& r = right.sorted_docs[f];
            l.reserve(docs.size() / 2);
            r.reserve(docs.size() / 2);
            for (int d : docs) {
                (go_left[static_cast<size_t>(d)] ? l : r).push_back(d);
            }
        });
        for (int d : left.sorted_docs[0]) {
            left.sum_lambda += lambdas[static_cast<size_t>(d)];
            left.sum_hessian += hessians[static_cast<size_t>(d)];
        }
        right.sum_lambda = node.sum_lambda - left.sum_lambda;
        right.sum_hessian = node.sum_hessian - left.sum_hessian;

        TreeNode& parent = tree.nodes[static_cast<size_t>(node.node_id)];
        parent.feature = sf;
        parent.threshold = thr;
        parent.left = left.node_id;
        parent.right = right.node_id;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});

        compute_node_best(left, data, transposed, lambdas, params.min_samples_leaf);
        compute_node_best(right, data, transposed, lambdas, params.min_samples_leaf);
        open.push_back(std::move(left));
        open.push_back(std::move(right));
        ++num_leaves;
    }

    // Newton leaf values.
    for (OpenNode& leaf : open) {
        TreeNode& t = tree.nodes[static_cast<size_t>(leaf.node_id)];
        t.feature = -1;
        t.value = leaf.sum_lambda / (leaf.sum_hessian + kHessianGuard);
        for (int d : leaf.sorted_docs[0]) leaf_of_doc[static_cast<size_t>(d)] = leaf.node_id;
    }
    return tree;
}

void all_lambdas(const RankingDataset& data, const std::vector<double>& scores, int truncation_k,
                 std::vector<double>& lambdas, std::vector<double>& hessians) {
    par_for(data.num_queries(), [&](size_t q) {
        size_t begin = data.query_offsets[q];
        size_t n = data.query_size(q);
        compute_query_lambdas({scores.data() + begin, n}, {data.labels.data() + begin, n},
                              {data.doc_keys.data() + begin, n}, truncation_k, false,
                              {lambdas.data() + begin, n}, {hessians.data() + begin, n});
    });
}

std::vector<std::vector<int>> presort(const RankingDataset& data) {
    // Query key joins the comparator so the order is content-determined
    // even when (value, doc key) pairs repeat across queries.
    std::vector<std::uint64_t> qkey(data.num_docs());
    for (size_t q = 0; q < data.num_queries(); ++q) {
        for (size_t i = data.query_offsets[q]; i < data.query_offsets[q + 1]; ++i) {
            qkey[i] = data.query_keys[q];
        }
    }
    std::vector<std::vector<int>> sorted(data.num_features);
    par_for(data.num_features, [&](size_t f) {
        std::vector<int>& order = sorted[f];
        order.resize(data.num_docs());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double va = data.features[static_cast<size_t>(a) * data.num_features + f];
            double vb = data.features[static_cast<size_t>(b) * data.num_features + f];
            if (va != vb) return va < vb;
            if (data.doc_keys[static_cast<size_t>(a)] != data.doc_keys[static_cast<size_t>(b)]) {
                return data.doc_keys[static_cast<size_t>(a)] < data.doc_keys[static_cast<size_t>(b)];
            }
            return qkey[static_cast<size_t>(a)] < qkey[static_cast<size_t>(b)];
        });
    });
    return sorted;
}

}  // namespace

double dataset_ndcg_at_k(const RankingDataset& dataset, std::span<const double> scores, int k) {
    double sum = 0;
    size_t counted = 0;
    std::vector<size_t> order;
    for (size_t q = 0; q < dataset.num_queries(); ++q) {
        size_t begin = dataset.query_offsets[q];
        size_t n = dataset.query_size(q);
        size_t positives = 0;
        for (size_t i = begin; i < begin + n; ++i) positives += dataset.labels[i] > 0 ? 1 : 0;
        if (positives == 0) continue;
        order.resize(n);
        std::iota(order.begin(), order.end(), begin);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return dataset.doc_keys[a] < dataset.doc_keys[b];
        });
        double dcg = 0;
        for (size_t r = 0; r < n && static_cast<int>(r) < k; ++r) {
            if (dataset.labels[order[r]] > 0) dcg += discount(r + 1, k);
        }
        sum += dcg / ideal_dcg(positives, k);
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

GbmModel ltr_fit(const RankingDataset& train, const RankingDataset& validation,
                 const LtrParams& params, FitReport* report) {
    if (train.num_docs() == 0) throw std::invalid_argument("ltr_fit: empty training set");

    GbmModel model;
    model.num_features = train.num_features;
    model.base_score = 0.0;
    model.learning_rate = params.learning_rate;

    std::vector<std::vector<int>> root_sorted = presort(train);
    std::vector<double> transposed = transpose_features(train);

    std::vector<double> scores(train.num_docs(), model.base_score);
    std::vector<double> valid_scores(validation.num_docs(), model.base_score);
    std::vector<double> lambdas(train.num_docs());
    std::vector<double> hessians(train.num_docs());
    std::vector<int> leaf_of_doc(train.num_docs(), 0);

    for (int round = 0; round < params.rounds; ++round) {
        all_lambdas(train, scores, params.truncation_k, lambdas, hessians);

        double total_abs = 0;
        for (double l : lambdas) total_abs += std::fabs(l);
        if (total_abs == 0.0) break;  // nothing left to learn (or uniform labels)

        RegressionTree tree =
            fit_tree(train, transposed, lambdas, hessians, root_sorted, params, leaf_of_doc);

        for (size_t d = 0; d < train.num_docs(); ++d) {
            scores[d] += params.learning_rate *
                         tree.nodes[static_cast<size_t>(leaf_of_doc[d])].value;
        }
        if (!validation.labels.empty()) {
            par_for(validation.num_docs(), [&](size_t d) {
                valid_scores[d] += params.learning_rate * tree.eval(validation.doc(d));
            });
        }
        model.trees.push_back(std::move(tree));

        if (report) {
            report->validation_ndcg.push_back(
                dataset_ndcg_at_k(validation, valid_scores, params.truncation_k));
        }
    }
    return model;
}

void GbmModel::save_json(const std::string& path) const {
    nlohmann::json j;
    j["format"] = "tvrec-ltr";
    j["num_features"] = num_features;
    j["base_score"] = base_score;
    j["learning_rate"] = learning_rate;
    nlohmann::json trees_json = nlohmann::json::array();
    for (const RegressionTree& tree : trees) {
        nlohmann::json t;
        for (const TreeNode& n : tree.nodes) {
            t["feature"].push_back(n.feature);
            t["threshold"].push_back(n.threshold);
            t["left"].push_back(n.left);
            t["right"].push_back(n.right);
            t["value"].push_back(n.value);
        }
        trees_json.push_back(std::move(t));
    }
    j["trees"] = std::move(trees_json);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model: " + path);
    out << j.dump() << "\n";
}

GbmModel GbmModel::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read model: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != "tvrec-ltr") throw std::runtime_error("not an ltr model: " + path);
    GbmModel m;
    m.num_features = j.at("num_features").get<size_t>();
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& t : j.at("trees")) {
        RegressionTree tree;
        size_t n = t.at("feature").size();
        tree.nodes.resize(n);
        for (size_t i = 0; i < n; ++i) {
            tree.nodes[i].feature = t.at("feature")[i].get<int>();
            tree.nodes[i].threshold = t.at("threshold")[i].get<double>();
            tree.nodes[i].left = t.at("left")[i].get<int>();
            tree.nodes[i].right = t.at("right")[i].get<int>();
            tree.nodes[i].value = t.at("value")[i].get<double>();
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

}  // namespace tvrec
