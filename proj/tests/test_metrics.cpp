// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tvrec/metrics.hpp"
#include "tvrec/rng.hpp"

using namespace tvrec;

namespace {

ProgramTraits traits(Category c, const std::string& sub, ChannelId ch) { return {c, sub, ch}; }

}  // namespace

TEST_CASE("pair_distance hits the four possible values") {
    ProgramTraits a = traits(Category::Sports, "sports-one", 3);
    CHECK(pair_distance(a, a) == 0.0);
    CHECK(pair_distance(a, traits(Category::Sports, "sports-one", 4)) == doctest::Approx(1.0 / 3));
    CHECK(pair_distance(a, traits(Category::Sports, "sports-two", 4)) == doctest::Approx(2.0 / 3));
    CHECK(pair_distance(a, traits(Category::News, "news-one", 4)) == 1.0);
}

TEST_CASE("pair_distance is symmetric over all indicator combinations") {
    for (int mask = 0; mask < 8; ++mask) {
        ProgramTraits a = traits(Category::Movies, "m-one", 7);
        ProgramTraits b = a;
        if (mask & 1) b.category = Category::Kids;
        if (mask & 2) b.subcategory = "k-two";
        if (mask & 4) b.channel = 8;
        double d = pair_distance(a, b);
        CHECK(d == pair_distance(b, a));
        int differing = ((mask & 1) != 0) + ((mask & 2) != 0) + ((mask & 4) != 0);
        CHECK(d == doctest::Approx(differing / 3.0));
    }
}

TEST_CASE("ndcg_at_k closed-form cases") {
    std::set<ProgramId> truth{2};
    // single relevant at position 2, k=5
    auto v = ndcg_at_k({1, 2, 3, 4, 5}, truth, 5);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));

    // all top-k watched
    std::set<ProgramId> all{1, 2, 3};
    CHECK(*ndcg_at_k({1, 2, 3}, all, 3) == doctest::Approx(1.0));

    // no relevant in list but truth nonempty
    CHECK(*ndcg_at_k({7, 8, 9}, truth, 3) == 0.0);

    // empty truth -> undefined, not zero
    CHECK_FALSE(ndcg_at_k({1, 2}, {}, 2).has_value());
}

TEST_CASE("ndcg is 1 iff the top positions are all relevant") {
    std::set<ProgramId> truth{4, 5};
    CHECK(*ndcg_at_k({4, 5, 1, 2, 3}, truth, 5) == doctest::Approx(1.0));
    CHECK(*ndcg_at_k({4, 1, 5, 2, 3}, truth, 5) < 1.0);
    // permuting the irrelevant tail beyond k changes nothing
    CHECK(*ndcg_at_k({4, 5, 1, 2, 3}, truth, 2) ==
          *ndcg_at_k({4, 5, 3, 1, 2}, truth, 2));
}

TEST_CASE("ild_at_k hand cases") {
    ProgramTraits same = traits(Category::News, "n-one", 1);
    CHECK(ild_at_k({same, same, same}, 3) == 0.0);
    CHECK(ild_at_k({same}, 5) == 0.0);  // k=1: no pairs

    std::vector<ProgramTraits> all_far = {
        traits(Category::News, "a", 1),
        traits(Category::Kids, "b", 2),
        traits(Category::Sports, "c", 3),
    };
    CHECK(ild_at_k(all_far, 3) == doctest::Approx(1.0));

    // pair distances {1, 2/3, 2/3} -> mean 7/9
    std::vector<ProgramTraits> mixed = {
        traits(Category::News, "x", 1),
        traits(Category::Kids, "y", 2),
        traits(Category::News, "y", 3),
    };
    CHECK(ild_at_k(mixed, 3) == doctest::Approx(7.0 / 9).epsilon(1e-12));
}

TEST_CASE("msi_at_k hand cases") {
    // every item watched by all users -> 0
    CHECK(msi_at_k({8, 8}, 2, 8) == 0.0);
    // watched by nobody -> 1
    CHECK(msi_at_k({0}, 1, 8) == 1.0);
    // N=8, audience=2 -> log2(4)/log2(8) = 2/3
    CHECK(msi_at_k({2}, 1, 8) == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("unexpectedness hand cases") {
    ProgramTraits a = traits(Category::News, "n", 1);
    CHECK(unexpectedness_at_k({a, a}, {a}, 2) == 0.0);
    CHECK(unexpectedness_at_k({a}, {}, 1) == 1.0);  // empty history convention

    // 2-item list x 2-item history with distances {1, 1, 2/3, 1}
    std::vector<ProgramTraits> list = {
        traits(Category::News, "n", 1),
        traits(Category::Kids, "k", 2),
    };
    std::vector<ProgramTraits> history = {
        traits(Category::Sports, "s", 3),
        traits(Category::Kids, "q", 4),
    };
    CHECK(unexpectedness_at_k(list, history, 2) == doctest::Approx(11.0 / 12).epsilon(1e-12));
}

TEST_CASE("metrics agree with brute-force oracles on random instances") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        oracle::MetricInstance inst = oracle::random_metric_instance(rng);
        auto got = ndcg_at_k(inst.list, inst.truth, inst.k);
        auto want = oracle::ndcg(inst.list, inst.truth, inst.k);
        CHECK(got.has_value() == want.has_value());
        if (got && want) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
        CHECK(ild_at_k(inst.traits, inst.k) ==
              doctest::Approx(oracle::ild(inst.traits, inst.k)).epsilon(1e-12));
        CHECK(msi_at_k(inst.audience, inst.k, inst.n_users) ==
              doctest::Approx(oracle::msi(inst.audience, inst.k, inst.n_users)).epsilon(1e-12));
        CHECK(unexpectedness_at_k(inst.traits, inst.history, inst.k) ==
              doctest::Approx(oracle::unexpectedness(inst.traits, inst.history, inst.k))
                  .epsilon(1e-12));
    }
}

TEST_CASE("all metrics stay in [0,1] on random instances") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        oracle::MetricInstance inst = oracle::random_metric_instance(rng);
        auto n = ndcg_at_k(inst.list, inst.truth, inst.k);
        if (n) {
            CHECK(*n >= 0.0);
            CHECK(*n <= 1.0);
        }
        double v = ild_at_k(inst.traits, inst.k);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        v = msi_at_k(inst.audience, inst.k, inst.n_users);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        v = unexpectedness_at_k(inst.traits, inst.history, inst.k);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("k=1: ild is 0 and msi equals the single item's novelty") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        oracle::MetricInstance inst = oracle::random_metric_instance(rng);
        CHECK(ild_at_k(inst.traits, 1) == 0.0);
        if (!inst.audience.empty()) {
            double single = msi_at_k({inst.audience[0]}, 1, inst.n_users);
            CHECK(msi_at_k(inst.audience, 1, inst.n_users) == single);
        }
    }
}
