// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

// Brute-force oracles, independent of the library implementations they
// check. Everything here favors obviousness over speed.

#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "tvrec/metrics.hpp"
#include "tvrec/rng.hpp"

namespace oracle {

inline double log2_discount(int position_1based) {
    return 1.0 / (std::log(static_cast<double>(position_1based) + 1.0) / std::log(2.0));
}

inline std::optional<double> ndcg(const std::vector<tvrec::ProgramId>& list,
                                  const std::set<tvrec::ProgramId>& truth, int k) {
    if (truth.empty()) return std::nullopt;
    double dcg = 0;
    for (int pos = 1; pos <= static_cast<int>(list.size()) && pos <= k; ++pos) {
        bool relevant = truth.find(list[static_cast<size_t>(pos - 1)]) != truth.end();
        if (relevant) dcg += log2_discount(pos);
    }
    double ideal = 0;
    int ideal_hits = static_cast<int>(truth.size());
    if (ideal_hits > k) ideal_hits = k;
    for (int pos = 1; pos <= ideal_hits; ++pos) ideal += log2_discount(pos);
    return dcg / ideal;
}

inline double ild(const std::vector<tvrec::ProgramTraits>& list, int k) {
    std::vector<tvrec::ProgramTraits> top;
    for (int i = 0; i < static_cast<int>(list.size()) && i < k; ++i) {
        top.push_back(list[static_cast<size_t>(i)]);
    }
    if (top.size() < 2) return 0.0;
    double total = 0;
    int pairs = 0;
    for (size_t i = 0; i < top.size(); ++i) {
        for (size_t j = 0; j < top.size(); ++j) {
            if (i >= j) continue;
            total += tvrec::pair_distance(top[i], top[j]);
            pairs += 1;
        }
    }
    return total / pairs;
}

inline double msi(const std::vector<int>& audience, int k, int n_users) {
    int depth = static_cast<int>(audience.size());
    if (depth > k) depth = k;
    if (depth == 0) return 0.0;
    double total = 0;
    for (int i = 0; i < depth; ++i) {
        int a = audience[static_cast<size_t>(i)];
        double item;
        if (n_users <= 1) {
            item = a == 0 ? 1.0 : 0.0;
        } else if (a == 0) {
            item = 1.0;
        } else {
            double self_information = std::log2(static_cast<double>(n_users)) -
                                      std::log2(static_cast<double>(a));
            item = self_information / std::log2(static_cast<double>(n_users));
        }
        total += item;
    }
    return total / depth;
}

inline double unexpectedness(const std::vector<tvrec::ProgramTraits>& list,
                             const std::vector<tvrec::ProgramTraits>& history, int k) {
    int depth = static_cast<int>(list.size());
    if (depth > k) depth = k;
    if (history.empty() || depth == 0) return 1.0;
    double total = 0;
    int count = 0;
    for (int i = 0; i < depth; ++i) {
        for (const auto& h : history) {
            total += tvrec::pair_distance(list[static_cast<size_t>(i)], h);
            count += 1;
        }
    }
    return total / count;
}

/// Random metric-test instance: a ranked list over a small catalog plus
/// truth/audience/history drawn from it.
struct MetricInstance {
    std::vector<tvrec::ProgramId> list;
    std::vector<tvrec::ProgramTraits> traits;
    std::vector<int> audience;
    std::set<tvrec::ProgramId> truth;
    std::vector<tvrec::ProgramTraits> history;
    int k = 5;
    int n_users = 10;
};

inline MetricInstance random_metric_instance(tvrec::SplitMix64& rng) {
    MetricInstance inst;
    int catalog = 2 + static_cast<int>(rng.next_below(49));
    int len = 1 + static_cast<int>(rng.next_below(10));
    if (len > catalog) len = catalog;
    inst.k = 1 + static_cast<int>(rng.next_below(10));
    inst.n_users = 1 + static_cast<int>(rng.next_below(40));

    std::vector<tvrec::ProgramId> ids(static_cast<size_t>(catalog));
    for (int i = 0; i < catalog; ++i) ids[static_cast<size_t>(i)] = i + 1;
    for (size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.next_below(i)]);
    }
    for (int i = 0; i < len; ++i) {
        tvrec::ProgramId p = ids[static_cast<size_t>(i)];
        inst.list.push_back(p);
        inst.traits.push_back({static_cast<tvrec::Category>(rng.next_below(3)),
                               std::string(1, static_cast<char>('a' + rng.next_below(3))),
                               static_cast<tvrec::ChannelId>(rng.next_below(4))});
        inst.audience.push_back(static_cast<int>(rng.next_below(
            static_cast<std::uint64_t>(inst.n_users) + 1)));
    }
    for (tvrec::ProgramId p : ids) {
        if (rng.next_below(3) == 0) inst.truth.insert(p);
    }
    int history_len = static_cast<int>(rng.next_below(6));
    for (int i = 0; i < history_len; ++i) {
        inst.history.push_back({static_cast<tvrec::Category>(rng.next_below(3)),
                                std::string(1, static_cast<char>('a' + rng.next_below(3))),
                                static_cast<tvrec::ChannelId>(rng.next_below(4))});
    }
    return inst;
}

}  // namespace oracle
