// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <chrono>
#include <cstdio>
#include <vector>

#include "tvrec/ltr.hpp"
#include "tvrec/metrics.hpp"
#include "tvrec/parallel.hpp"
#include "tvrec/reference.hpp"
#include "tvrec/rng.hpp"
#include "tvrec/wrmf.hpp"

using namespace tvrec;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<WatchCount> random_observations(int users, int items, int per_user, SplitMix64& rng) {
    std::vector<WatchCount> obs;
    for (int u = 1; u <= users; ++u) {
        for (int k = 0; k < per_user; ++k) {
            obs.push_back({u, static_cast<ProgramId>(rng.next_below(static_cast<std::uint64_t>(items)) + 1),
                           static_cast<double>(1 + rng.next_below(4))});
        }
    }
    std::sort(obs.begin(), obs.end(), [](const WatchCount& a, const WatchCount& b) {
        if (a.user != b.user) return a.user < b.user;
        return a.program < b.program;
    });
    obs.erase(std::unique(obs.begin(), obs.end(),
                          [](const WatchCount& a, const WatchCount& b) {
                              return a.user == b.user && a.program == b.program;
                          }),
              obs.end());
    return obs;
}

void bench_als() {
    SplitMix64 rng(11);
    auto obs = random_observations(400, 1500, 60, rng);
    WrmfParams params;
    params.iterations = 0;
    MfModel model = wrmf_fit(obs, params);

    std::vector<std::vector<std::pair<int, double>>> user_obs(model.users.size());
    std::vector<std::vector<std::pair<int, double>>> item_obs(model.items.size());
    for (const WatchCount& w : obs) {
        int u = model.user_index.at(w.user);
        int i = model.item_index.at(w.program);
        user_obs[static_cast<size_t>(u)].emplace_back(i, w.r);
        item_obs[static_cast<size_t>(i)].emplace_back(u, w.r);
    }

    auto t0 = std::chrono::steady_clock::now();
    for (int it = 0; it < 3; ++it) {
        wrmf_solve_users(model, user_obs);
        wrmf_solve_items(model, item_obs);
    }
    double parallel_s = seconds_since(t0) / 3.0;

    MfModel serial = wrmf_fit(obs, params);
    t0 = std::chrono::steady_clock::now();
    ref::als_solve_users_dense(serial, obs);
    ref::als_solve_items_dense(serial, obs);
    double reference_s = seconds_since(t0);

    std::printf("%-34s %10.4fs per sweep (%d threads)\n", "ALS sweep (Gram kernels, OpenMP)",
                parallel_s, max_threads());
    std::printf("%-34s %10.4fs per sweep (serial)\n", "ALS sweep (dense reference)", reference_s);
}

void bench_lambdas() {
    SplitMix64 rng(22);
    const int queries = 3000, docs = 40;
    std::vector<double> scores(static_cast<size_t>(queries * docs));
    std::vector<int> labels(scores.size());
    std::vector<std::uint64_t> keys(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) {
        scores[i] = rng.next_double();
        labels[i] = rng.next_below(8) == 0 ? 1 : 0;
        keys[i] = i;
    }
    std::vector<double> lambdas(scores.size()), hessians(scores.size());

    auto t0 = std::chrono::steady_clock::now();
    par_for(static_cast<size_t>(queries), [&](size_t q) {
        size_t off = q * docs;
        compute_query_lambdas({&scores[off], docs}, {&labels[off], docs}, {&keys[off], docs}, 10,
                              false, {&lambdas[off], docs}, {&hessians[off], docs});
    });
    double parallel_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (int q = 0; q < queries; ++q) {
        size_t off = static_cast<size_t>(q) * docs;
        ref::lambdas_by_swap({&scores[off], docs}, {&labels[off], docs}, {&keys[off], docs}, 10,
                             false, {&lambdas[off], docs}, {&hessians[off], docs});
    }
    double reference_s = seconds_since(t0);

    std::printf("%-34s %10.4fs (%d queries, OpenMP)\n", "lambda batch (closed-form)", parallel_s,
                queries);
    std::printf("%-34s %10.4fs (%d queries, serial swap oracle)\n", "lambda batch (reference)",
                reference_s, queries);
}

void bench_metrics() {
    SplitMix64 rng(33);
    const int sessions = 20000, list_len = 10;
    std::vector<std::vector<ProgramTraits>> lists(sessions);
    for (auto& list : lists) {
        list.resize(list_len);
        for (auto& t : list) {
            t.category = static_cast<Category>(rng.next_below(8));
            t.subcategory = std::to_string(rng.next_below(4));
            t.channel = static_cast<ChannelId>(rng.next_below(20));
        }
    }
    std::vector<double> out(static_cast<size_t>(sessions));

    auto t0 = std::chrono::steady_clock::now();
    par_for(static_cast<size_t>(sessions), [&](size_t s) { out[s] = ild_at_k(lists[s], list_len); });
    double parallel_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (int s = 0; s < sessions; ++s) {
        out[static_cast<size_t>(s)] = ild_at_k(lists[static_cast<size_t>(s)], list_len);
    }
    double serial_s = seconds_since(t0);

    std::printf("%-34s %10.4fs (%d lists, OpenMP)\n", "ILD batch", parallel_s, sessions);
    std::printf("%-34s %10.4fs (%d lists, serial)\n", "ILD batch (serial)", serial_s, sessions);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());
    bench_als();
    bench_lambdas();
    bench_metrics();
    return 0;
}
