// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tvrec::ref {

namespace {

// Gaussian elimination with partial pivoting; small f x f systems only.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[static_cast<size_t>(r) * n + col]) >
                std::fabs(a[static_cast<size_t>(pivot) * n + col])) {
                pivot = r;
            }
        }
        if (a[static_cast<size_t>(pivot) * n + col] == 0) {
            throw std::runtime_error("singular matrix in reference solver");
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a[static_cast<size_t>(pivot) * n + c], a[static_cast<size_t>(col) * n + c]);
            }
            std::swap(b[static_cast<size_t>(pivot)], b[static_cast<size_t>(col)]);
        }
        for (int r = col + 1; r < n; ++r) {
            double factor = a[static_cast<size_t>(r) * n + col] / a[static_cast<size_t>(col) * n + col];
            for (int c = col; c < n; ++c) {
                a[static_cast<size_t>(r) * n + c] -= factor * a[static_cast<size_t>(col) * n + c];
            }
            b[static_cast<size_t>(r)] -= factor * b[static_cast<size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double sum = b[static_cast<size_t>(r)];
        for (int c = r + 1; c < n; ++c) sum -= a[static_cast<size_t>(r) * n + c] * x[static_cast<size_t>(c)];
        x[static_cast<size_t>(r)] = sum / a[static_cast<size_t>(r) * n + r];
    }
    return x;
}

std::map<std::pair<int, int>, double> observed_r(const MfModel& model,
                                                 const std::vector<WatchCount>& observations) {
    std::map<std::pair<int, int>, double> r;
    for (const WatchCount& w : observations) {
        if (w.r <= 0) continue;
        r[{model.user_index.at(w.user), model.item_index.at(w.program)}] = w.r;
    }
    return r;
}

}  // namespace

void als_solve_users_dense(MfModel& model, const std::vector<WatchCount>& observations) {
    const int f = model.factors;
    auto r = observed_r(model, observations);
    for (size_t u = 0; u < model.users.size(); ++u) {
        std::vector<double> a(static_cast<size_t>(f) * f, 0.0);
        std::vector<double> b(static_cast<size_t>(f), 0.0);
        for (int i = 0; i < f; ++i) a[static_cast<size_t>(i) * f + i] = model.reg;
        for (size_t item = 0; item < model.items.size(); ++item) {
            auto it = r.find({static_cast<int>(u), static_cast<int>(item)});
            double r_ui = it == r.end() ? 0.0 : it->second;
            double c = 1.0 + model.alpha * r_ui;
            double p = r_ui > 0 ? 1.0 : 0.0;
            const double* y = &model.item_factors[item * static_cast<size_t>(f)];
            for (int i = 0; i < f; ++i) {
                b[static_cast<size_t>(i)] += c * p * y[i];
                for (int j = 0; j < f; ++j) {
                    a[static_cast<size_t>(i) * f + j] += c * y[i] * y[j];
                }
            }
        }
        std::vector<double> x = solve_dense(std::move(a), std::move(b), f);
        std::copy(x.begin(), x.end(), &model.user_factors[u * static_cast<size_t>(f)]);
    }
}

void als_solve_items_dense(MfModel& model, const std::vector<WatchCount>& observations) {
    const int f = model.factors;
    auto r = observed_r(model, observations);
    for (size_t item = 0; item < model.items.size(); ++item) {
        std::vector<double> a(static_cast<size_t>(f) * f, 0.0);
        std::vector<double> b(static_cast<size_t>(f), 0.0);
        for (int i = 0; i < f; ++i) a[static_cast<size_t>(i) * f + i] = model.reg;
        for (size_t u = 0; u < model.users.size(); ++u) {
            auto it = r.find({static_cast<int>(u), static_cast<int>(item)});
            double r_ui = it == r.end() ? 0.0 : it->second;
            double c = 1.0 + model.alpha * r_ui;
            double p = r_ui > 0 ? 1.0 : 0.0;
            const double* x = &model.user_factors[u * static_cast<size_t>(f)];
            for (int i = 0; i < f; ++i) {
                b[static_cast<size_t>(i)] += c * p * x[i];
                for (int j = 0; j < f; ++j) {
                    a[static_cast<size_t>(i) * f + j] += c * x[i] * x[j];
                }
            }
        }
        std::vector<double> y = solve_dense(std::move(a), std::move(b), f);
        std::copy(y.begin(), y.end(), &model.item_factors[item * static_cast<size_t>(f)]);
    }
}

double wrmf_loss_dense(const MfModel& model, const std::vector<WatchCount>& observations) {
    auto r = observed_r(model, observations);
    double loss = 0;
    for (size_t u = 0; u < model.users.size(); ++u) {
        for (size_t item = 0; item < model.items.size(); ++item) {
            auto it = r.find({static_cast<int>(u), static_cast<int>(item)});
            double r_ui = it == r.end() ? 0.0 : it->second;
            double c = 1.0 + model.alpha * r_ui;
            double p = r_ui > 0 ? 1.0 : 0.0;
            double pred = model.predict(model.users[u], model.items[item]);
            loss += c * (p - pred) * (p - pred);
        }
    }
    double reg = 0;
    for (double v : model.user_factors) reg += v * v;
    for (double v : model.item_factors) reg += v * v;
    return loss + model.reg * reg;
}

void lambdas_by_swap(std::span<const double> scores, std::span<const int> labels,
                     std::span<const std::uint64_t> keys, int truncation_k, bool unit_delta,
                     std::span<double> lambdas, std::span<double> hessians) {
    const size_t n = scores.size();
    std::fill(lambdas.begin(), lambdas.end(), 0.0);
    std::fill(hessians.begin(), hessians.end(), 0.0);

    size_t num_positives = 0;
    for (size_t i = 0; i < n; ++i) num_positives += labels[i] > 0 ? 1 : 0;
    if (num_positives == 0 || num_positives == n) return;

    std::vector<size_t> ranking(n);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::sort(ranking.begin(), ranking.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (labels[a] != labels[b]) return labels[a] > labels[b];
        return keys[a] < keys[b];
    });

    auto dcg_of = [&](const std::vector<size_t>& order) {
        double dcg = 0;
        for (size_t p = 0; p < order.size() && static_cast<int>(p) < truncation_k; ++p) {
            if (labels[order[p]] > 0) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
        }
        return dcg;
    };
    double idcg = 0;
    for (size_t p = 0; p < std::min<size_t>(num_positives, static_cast<size_t>(truncation_k)); ++p) {
        idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    }
    double base_dcg = dcg_of(ranking);

    std::vector<size_t> pos_in_ranking(n);
    for (size_t p = 0; p < n; ++p) pos_in_ranking[ranking[p]] = p;

    for (size_t i = 0; i < n; ++i) {
        if (labels[i] <= 0) continue;
        for (size_t j = 0; j < n; ++j) {
            if (labels[j] > 0) continue;
            double delta = 1.0;
            if (!unit_delta) {
                std::vector<size_t> swapped = ranking;
                std::swap(swapped[pos_in_ranking[i]], swapped[pos_in_ranking[j]]);
                delta = std::fabs(dcg_of(swapped) - base_dcg) / idcg;
            }
            double rho = 1.0 / (1.0 + std::exp(scores[i] - scores[j]));
            lambdas[i] += rho * delta;
            lambdas[j] -= rho * delta;
            hessians[i] += rho * (1.0 - rho) * delta;
            hessians[j] += rho * (1.0 - rho) * delta;
        }
    }
}

}  // namespace tvrec::ref
