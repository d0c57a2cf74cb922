// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "tvrec/ltr.hpp"
#include "tvrec/reference.hpp"
#include "tvrec/rng.hpp"

using namespace tvrec;

namespace {

// Pairwise logistic cost sum log(1+exp(-(s_i - s_j))) over label_i > label_j.
double pairwise_logistic_cost(const std::vector<double>& scores, const std::vector<int>& labels) {
    double cost = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[i] > labels[j]) {
                cost += std::log1p(std::exp(-(scores[i] - scores[j])));
            }
        }
    }
    return cost;
}

struct RandomQuery {
    std::vector<double> scores;
    std::vector<int> labels;
    std::vector<std::uint64_t> keys;
};

RandomQuery random_query(SplitMix64& rng, int n, bool force_both_classes = true) {
    RandomQuery q;
    for (int i = 0; i < n; ++i) {
        q.scores.push_back(rng.next_double() * 4 - 2);
        q.labels.push_back(rng.next_below(3) == 0 ? 1 : 0);
        q.keys.push_back(static_cast<std::uint64_t>(i) + 1);
    }
    if (force_both_classes) {
        q.labels[0] = 1;
        q.labels[static_cast<size_t>(n - 1)] = 0;
    }
    return q;
}

// Separable data: feature 0 equals the label, features 1..3 are noise.
RankingDataset separable_dataset(int queries, int docs_per_query, std::uint64_t seed) {
    SplitMix64 rng(seed);
    RankingDataset data;
    for (int q = 0; q < queries; ++q) {
        data.begin_query(static_cast<std::uint64_t>(q) + 1);
        for (int d = 0; d < docs_per_query; ++d) {
            int label = d < docs_per_query / 3 ? 1 : 0;
            std::vector<double> features = {static_cast<double>(label), rng.next_double(),
                                            rng.next_double(), rng.next_double()};
            data.add_doc(features, label,
                         static_cast<std::uint64_t>(q * docs_per_query + d) + 1);
        }
        data.end_query();
    }
    return data;
}

}  // namespace

TEST_CASE("lambda antisymmetry: per-query lambdas sum to zero") {
    SplitMix64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        RandomQuery q = random_query(rng, 8);
        std::vector<double> lambdas(q.scores.size()), hessians(q.scores.size());
        compute_query_lambdas(q.scores, q.labels, q.keys, 10, false, lambdas, hessians);
        double sum = 0;
        for (double l : lambdas) sum += l;
        CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
        for (double h : hessians) CHECK(h >= 0.0);
    }
}

TEST_CASE("uniform-label queries produce zero lambdas") {
    std::vector<double> scores{1.0, 2.0, 3.0};
    std::vector<std::uint64_t> keys{1, 2, 3};
    std::vector<double> lambdas(3), hessians(3);
    std::vector<int> all_pos{1, 1, 1};
    compute_query_lambdas(scores, all_pos, keys, 10, false, lambdas, hessians);
    for (double l : lambdas) CHECK(l == 0.0);
    std::vector<int> all_neg{0, 0, 0};
    compute_query_lambdas(scores, all_neg, keys, 10, false, lambdas, hessians);
    for (double l : lambdas) CHECK(l == 0.0);
}

TEST_CASE("two docs, positive below negative at equal scores") {
    // rho = 0.5; positive lambda = 0.5 * |delta nDCG| and positive.
    std::vector<double> scores{0.0, 0.0};
    std::vector<int> labels{0, 1};
    std::vector<std::uint64_t> keys{1, 2};
    std::vector<double> lambdas(2), hessians(2);
    compute_query_lambdas(scores, labels, keys, 10, false, lambdas, hessians);
    // Ranking ties break label-desc: positive ranks first; swap moves it to
    // rank 2: |delta| = (1 - 1/log2(3)) / 1.
    double delta = 1.0 - 1.0 / std::log2(3.0);
    CHECK(lambdas[1] == doctest::Approx(0.5 * delta).epsilon(1e-12));
    CHECK(lambdas[0] == doctest::Approx(-0.5 * delta).epsilon(1e-12));
}

TEST_CASE("saturated pairs contribute nearly nothing") {
    std::vector<double> scores{100.0, 0.0};
    std::vector<int> labels{1, 0};
    std::vector<std::uint64_t> keys{1, 2};
    std::vector<double> lambdas(2), hessians(2);
    compute_query_lambdas(scores, labels, keys, 10, false, lambdas, hessians);
    CHECK(std::fabs(lambdas[0]) < 1e-20);
}

TEST_CASE("unit-delta lambdas match finite differences of the pairwise cost") {
    SplitMix64 rng(2199);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        RandomQuery q = random_query(rng, 5);
        std::vector<double> lambdas(5), hessians(5);
        compute_query_lambdas(q.scores, q.labels, q.keys, 10, true, lambdas, hessians);
        for (size_t i = 0; i < 5; ++i) {
            std::vector<double> up = q.scores, down = q.scores;
            up[i] += h;
            down[i] -= h;
            double grad =
                (pairwise_logistic_cost(up, q.labels) - pairwise_logistic_cost(down, q.labels)) /
                (2 * h);
            // lambdas are the negative cost gradient
            CHECK(lambdas[i] == doctest::Approx(-grad).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("closed-form |delta nDCG| matches the literal swap oracle") {
    SplitMix64 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(9));
        RandomQuery q = random_query(rng, n);
        std::vector<double> l1(q.scores.size()), h1(q.scores.size());
        std::vector<double> l2(q.scores.size()), h2(q.scores.size());
        int k = 1 + static_cast<int>(rng.next_below(10));
        compute_query_lambdas(q.scores, q.labels, q.keys, k, false, l1, h1);
        ref::lambdas_by_swap(q.scores, q.labels, q.keys, k, false, l2, h2);
        for (size_t i = 0; i < l1.size(); ++i) {
            CHECK(l1[i] == doctest::Approx(l2[i]).epsilon(1e-12).scale(1.0));
            CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("rounds=0 gives a constant model") {
    RankingDataset data = separable_dataset(10, 9, 5);
    LtrParams params;
    params.rounds = 0;
    GbmModel model = ltr_fit(data, data, params);
    CHECK(model.trees.empty());
    std::vector<double> features(4, 0.5);
    CHECK(model.predict(features) == model.base_score);
}

TEST_CASE("a single separable feature is learned within 10 rounds") {
    RankingDataset data = separable_dataset(60, 9, 6);
    LtrParams params;
    params.rounds = 10;
    GbmModel model = ltr_fit(data, data, params);

    std::vector<double> scores(data.num_docs());
    for (size_t d = 0; d < data.num_docs(); ++d) scores[d] = model.predict(data.doc(d));
    CHECK(dataset_ndcg_at_k(data, scores, 10) == doctest::Approx(1.0));
}

TEST_CASE("training nDCG improves from round 1 to round 100 on noisy data") {
    SplitMix64 rng(901);
    RankingDataset data;
    for (int q = 0; q < 80; ++q) {
        data.begin_query(static_cast<std::uint64_t>(q) + 1);
        for (int d = 0; d < 12; ++d) {
            double signal = rng.next_double();
            double noise1 = rng.next_double(), noise2 = rng.next_double();
            int label = signal + 0.7 * noise1 > 1.1 ? 1 : 0;
            std::vector<double> features = {signal, noise1 * 0.2 + rng.next_double() * 0.8, noise2};
            data.add_doc(features, label, static_cast<std::uint64_t>(q * 12 + d) + 1);
        }
        data.end_query();
    }
    LtrParams params;
    params.rounds = 100;
    params.min_samples_leaf = 10;
    FitReport report;
    GbmModel model = ltr_fit(data, data, params, &report);
    REQUIRE(report.validation_ndcg.size() >= 2);
    CHECK(report.validation_ndcg.back() >= report.validation_ndcg.front());
    CHECK(model.trees.size() <= 100);
}

TEST_CASE("model fit is invariant to query order and document order") {
    SplitMix64 rng(555);
    RankingDataset a;
    std::vector<std::vector<std::tuple<std::vector<double>, int, std::uint64_t>>> queries;
    for (int q = 0; q < 12; ++q) {
        std::vector<std::tuple<std::vector<double>, int, std::uint64_t>> docs;
        for (int d = 0; d < 8; ++d) {
            std::vector<double> features = {rng.next_double(), rng.next_double(),
                                            rng.next_double()};
            int label = d % 3 == 0 ? 1 : 0;
            docs.emplace_back(features, label, static_cast<std::uint64_t>(d) + 1);
        }
        queries.push_back(docs);
    }
    auto build = [&](bool reversed) {
        RankingDataset data;
        auto qs = queries;
        if (reversed) std::reverse(qs.begin(), qs.end());
        for (size_t q = 0; q < qs.size(); ++q) {
            auto docs = qs[q];
            if (reversed) std::reverse(docs.begin(), docs.end());
            std::uint64_t qkey = reversed ? static_cast<std::uint64_t>(queries.size() - q)
                                          : static_cast<std::uint64_t>(q + 1);
            data.begin_query(qkey);
            for (auto& [f, l, k] : docs) data.add_doc(f, l, k);
            data.end_query();
        }
        return data;
    };
    LtrParams params;
    params.rounds = 20;
    params.min_samples_leaf = 5;
    GbmModel m1 = ltr_fit(build(false), RankingDataset{}, params);
    GbmModel m2 = ltr_fit(build(true), RankingDataset{}, params);

    SplitMix64 probe(9);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x = {probe.next_double(), probe.next_double(), probe.next_double()};
        CHECK(m1.predict(x) == m2.predict(x));
    }
}

TEST_CASE("prediction equals the traced sum of leaf values") {
    RankingDataset data = separable_dataset(30, 9, 8);
    LtrParams params;
    params.rounds = 7;
    GbmModel model = ltr_fit(data, data, params);
    SplitMix64 rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x = {rng.next_double(), rng.next_double(), rng.next_double(),
                                 rng.next_double()};
        double traced = model.base_score;
        for (const RegressionTree& tree : model.trees) {
            int node = 0;
            while (tree.nodes[static_cast<size_t>(node)].feature >= 0) {
                const TreeNode& n = tree.nodes[static_cast<size_t>(node)];
                node = x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
            }
            traced += model.learning_rate * tree.nodes[static_cast<size_t>(node)].value;
        }
        CHECK(model.predict(x) == doctest::Approx(traced).epsilon(1e-15));
    }
}

TEST_CASE("predict rejects schema mismatches") {
    RankingDataset data = separable_dataset(10, 9, 3);
    LtrParams params;
    params.rounds = 2;
    GbmModel model = ltr_fit(data, data, params);
    std::vector<double> wrong(7, 0.0);
    CHECK_THROWS_AS(model.predict(wrong), std::invalid_argument);
}

TEST_CASE("all-uniform labels give a base-score-only model") {
    RankingDataset data;
    for (int q = 0; q < 5; ++q) {
        data.begin_query(static_cast<std::uint64_t>(q) + 1);
        for (int d = 0; d < 6; ++d) {
            std::vector<double> features = {static_cast<double>(d), 1.0};
            data.add_doc(features, 1, static_cast<std::uint64_t>(d) + 1);
        }
        data.end_query();
    }
    LtrParams params;
    GbmModel model = ltr_fit(data, RankingDataset{}, params);
    CHECK(model.trees.empty());
}

TEST_CASE("serialization round trip preserves predictions") {
    RankingDataset data = separable_dataset(30, 9, 12);
    LtrParams params;
    params.rounds = 15;
    GbmModel model = ltr_fit(data, data, params);
    std::string path =
        (std::filesystem::temp_directory_path() / "tvrec_ltr_roundtrip.json").string();
    model.save_json(path);
    GbmModel loaded = GbmModel::load_json(path);
    SplitMix64 rng(77);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x = {rng.next_double(), rng.next_double(), rng.next_double(),
                                 rng.next_double()};
        CHECK(model.predict(x) == loaded.predict(x));
    }
    std::filesystem::remove(path);
}
