// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/wrmf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tvrec/parallel.hpp"
#include "tvrec/rng.hpp"

namespace tvrec {

namespace {

// Solves A x = b for symmetric positive-definite A (f x f, row-major) by
// Cholesky decomposition, in place. A and b are scratch.
void solve_spd(std::vector<double>& a, std::vector<double>& b, int f) {
    // A = L L^T
    for (int i = 0; i < f; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = a[static_cast<size_t>(i) * f + j];
            for (int k = 0; k < j; ++k) {
                sum -= a[static_cast<size_t>(i) * f + k] * a[static_cast<size_t>(j) * f + k];
            }
            if (i == j) {
                if (sum <= 0) throw std::runtime_error("normal-equation matrix not positive definite");
                a[static_cast<size_t>(i) * f + j] = std::sqrt(sum);
            } else {
                a[static_cast<size_t>(i) * f + j] = sum / a[static_cast<size_t>(j) * f + j];
            }
        }
    }
    // L z = b
    for (int i = 0; i < f; ++i) {
        double sum = b[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) sum -= a[static_cast<size_t>(i) * f + k] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = sum / a[static_cast<size_t>(i) * f + i];
    }
    // L^T x = z
    for (int i = f - 1; i >= 0; --i) {
        double sum = b[static_cast<size_t>(i)];
        for (int k = i + 1; k < f; ++k) sum -= a[static_cast<size_t>(k) * f + i] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = sum / a[static_cast<size_t>(i) * f + i];
    }
}

// Gram matrix G = M^T M for a rows x f row-major matrix.
std::vector<double> gram(const std::vector<double>& m, size_t rows, int f) {
    std::vector<double> g(static_cast<size_t>(f) * f, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        const double* row = &m[r * static_cast<size_t>(f)];
        for (int i = 0; i < f; ++i) {
            for (int j = 0; j <= i; ++j) {
                g[static_cast<size_t>(i) * f + j] += row[i] * row[j];
            }
        }
    }
    for (int i = 0; i < f; ++i) {
        for (int j = i + 1; j < f; ++j) {
            g[static_cast<size_t>(i) * f + j] = g[static_cast<size_t>(j) * f + i];
        }
    }
    return g;
}

// One side of a half-sweep: solve row `r` of `out` given the fixed matrix
// `fixed`, its Gram matrix, and the observed (fixed-row index, r_ui) list.
// With confidence c = 1 + alpha r, the normal equations are
//   (G + sum_obs (c-1) y y^T + reg I) x = sum_obs c y.
void solve_row(double* out_row, const std::vector<double>& fixed,
               const std::vector<double>& fixed_gram,
               const std::vector<std::pair<int, double>>& obs, int f, double alpha, double reg,
               std::vector<double>& a_scratch, std::vector<double>& b_scratch) {
    a_scratch = fixed_gram;
    for (int i = 0; i < f; ++i) a_scratch[static_cast<size_t>(i) * f + i] += reg;
    std::fill(b_scratch.begin(), b_scratch.end(), 0.0);
    for (const auto& [idx, r] : obs) {
        const double* y = &fixed[static_cast<size_t>(idx) * f];
        double cm1 = alpha * r;  // c - 1
        double c = 1.0 + cm1;
        for (int i = 0; i < f; ++i) {
            b_scratch[static_cast<size_t>(i)] += c * y[i];
            for (int j = 0; j <= i; ++j) {
                a_scratch[static_cast<size_t>(i) * f + j] += cm1 * y[i] * y[j];
            }
        }
    }
    for (int i = 0; i < f; ++i) {
        for (int j = i + 1; j < f; ++j) {
            a_scratch[static_cast<size_t>(i) * f + j] = a_scratch[static_cast<size_t>(j) * f + i];
        }
    }
    solve_spd(a_scratch, b_scratch, f);
    std::copy(b_scratch.begin(), b_scratch.end(), out_row);
}

void half_sweep(std::vector<double>& target, const std::vector<double>& fixed, size_t target_rows,
                const std::vector<std::vector<std::pair<int, double>>>& obs, int f, double alpha,
                double reg) {
    std::vector<double> fixed_gram = gram(fixed, fixed.size() / static_cast<size_t>(f), f);
    par_for(target_rows, [&](size_t r) {
        std::vector<double> a(static_cast<size_t>(f) * f);
        std::vector<double> b(static_cast<size_t>(f));
        solve_row(&target[r * static_cast<size_t>(f)], fixed, fixed_gram, obs[r], f, alpha, reg, a,
                  b);
    });
}

}  // namespace

double MfModel::predict(UserId user, ProgramId program) const {
    auto uit = user_index.find(user);
    auto iit = item_index.find(program);
    if (uit == user_index.end() || iit == item_index.end()) return 0.0;
    const double* x = &user_factors[static_cast<size_t>(uit->second) * factors];
    const double* y = &item_factors[static_cast<size_t>(iit->second) * factors];
    double dot = 0;
    for (int k = 0; k < factors; ++k) dot += x[k] * y[k];
    return dot;
}

void wrmf_solve_users(MfModel& model,
                      const std::vector<std::vector<std::pair<int, double>>>& user_obs) {
    half_sweep(model.user_factors, model.item_factors, model.users.size(), user_obs, model.factors,
               model.alpha, model.reg);
}

void wrmf_solve_items(MfModel& model,
                      const std::vector<std::vector<std::pair<int, double>>>& item_obs) {
    half_sweep(model.item_factors, model.user_factors, model.items.size(), item_obs, model.factors,
               model.alpha, model.reg);
}

MfModel wrmf_fit(const std::vector<WatchCount>& observations, const WrmfParams& params,
                 std::vector<double>* loss_per_half_sweep) {
    if (observations.empty()) throw std::invalid_argument("wrmf_fit: no observations");
    if (params.reg <= 0) throw std::invalid_argument("wrmf_fit: reg must be > 0");
    if (params.alpha <= 0) throw std::invalid_argument("wrmf_fit: alpha must be > 0");
    if (params.factors < 1) throw std::invalid_argument("wrmf_fit: factors must be >= 1");

    // Effective r_ui: binary mode collapses counts to 1. Observations are
    // expected unique per (user, program).
    std::vector<WatchCount> obs = observations;
    if (params.binary_preferences) {
        for (WatchCount& w : obs) w.r = w.r > 0 ? 1.0 : 0.0;
    }

    MfModel model;
    model.factors = params.factors;
    model.alpha = params.alpha;
    model.reg = params.reg;
    for (const WatchCount& w : obs) {
        model.users.push_back(w.user);
        model.items.push_back(w.program);
    }
    std::sort(model.users.begin(), model.users.end());
    model.users.erase(std::unique(model.users.begin(), model.users.end()), model.users.end());
    std::sort(model.items.begin(), model.items.end());
    model.items.erase(std::unique(model.items.begin(), model.items.end()), model.items.end());
    for (size_t i = 0; i < model.users.size(); ++i) model.user_index[model.users[i]] = static_cast<int>(i);
    for (size_t i = 0; i < model.items.size(); ++i) model.item_index[model.items[i]] = static_cast<int>(i);

    const int f = params.factors;
    SplitMix64 rng(params.seed);
    model.user_factors.resize(model.users.size() * static_cast<size_t>(f));
    model.item_factors.resize(model.items.size() * static_cast<size_t>(f));
    for (double& v : model.user_factors) v = rng.next_double() * 0.1;
    for (double& v : model.item_factors) v = rng.next_double() * 0.1;

    std::vector<std::vector<std::pair<int, double>>> user_obs(model.users.size());
    std::vector<std::vector<std::pair<int, double>>> item_obs(model.items.size());
    for (const WatchCount& w : obs) {
        if (w.r <= 0) continue;
        int u = model.user_index[w.user];
        int i = model.item_index[w.program];
        user_obs[static_cast<size_t>(u)].emplace_back(i, w.r);
        item_obs[static_cast<size_t>(i)].emplace_back(u, w.r);
    }
    for (auto& v : user_obs) std::sort(v.begin(), v.end());
    for (auto& v : item_obs) std::sort(v.begin(), v.end());

    auto record_loss = [&] {
        if (loss_per_half_sweep) loss_per_half_sweep->push_back(wrmf_loss(model, obs));
    };
    record_loss();
    for (int iter = 0; iter < params.iterations; ++iter) {
        wrmf_solve_users(model, user_obs);
        record_loss();
        wrmf_solve_items(model, item_obs);
        record_loss();
    }
    if (loss_per_half_sweep) {
        for (double v : *loss_per_half_sweep) {
            if (!std::isfinite(v)) throw std::runtime_error("wrmf_fit: non-finite loss");
        }
    }
    return model;
}

double wrmf_loss(const MfModel& model, const std::vector<WatchCount>& observations) {
    const int f = model.factors;
    // sum over all pairs of (x.y)^2 = sum_u x^T (Y^T Y) x.
    std::vector<double> gy = gram(model.item_factors, model.items.size(), f);
    double all_sq = 0;
    for (size_t u = 0; u < model.users.size(); ++u) {
        const double* x = &model.user_factors[u * static_cast<size_t>(f)];
        for (int i = 0; i < f; ++i) {
            for (int j = 0; j < f; ++j) {
                all_sq += x[i] * gy[static_cast<size_t>(i) * f + j] * x[j];
            }
        }
    }
    // Observed cells: replace the c=1, p=0 contribution with c_ui, p=1.
    double obs_term = 0;
    for (const WatchCount& w : observations) {
        double r = w.r;
        if (r <= 0) continue;
        double pred = model.predict(w.user, w.program);
        double c = 1.0 + model.alpha * r;
        obs_term += c * (1.0 - pred) * (1.0 - pred) - pred * pred;
    }
    double reg_term = 0;
    for (double v : model.user_factors) reg_term += v * v;
    for (double v : model.item_factors) reg_term += v * v;
    return all_sq + obs_term + model.reg * reg_term;
}

void MfModel::save_json(const std::string& path) const {
    nlohmann::json j;
    j["format"] = "tvrec-wrmf";
    j["factors"] = factors;
    j["alpha"] = alpha;
    j["reg"] = reg;
    j["users"] = users;
    j["items"] = items;
    j["user_factors"] = user_factors;
    j["item_factors"] = item_factors;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model: " + path);
    out << j.dump() << "\n";
}

MfModel MfModel::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read model: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != "tvrec-wrmf") throw std::runtime_error("not a wrmf model: " + path);
    MfModel m;
    m.factors = j.at("factors").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.reg = j.at("reg").get<double>();
    m.users = j.at("users").get<std::vector<UserId>>();
    m.items = j.at("items").get<std::vector<ProgramId>>();
    m.user_factors = j.at("user_factors").get<std::vector<double>>();
    m.item_factors = j.at("item_factors").get<std::vector<double>>();
    for (size_t i = 0; i < m.users.size(); ++i) m.user_index[m.users[i]] = static_cast<int>(i);
    for (size_t i = 0; i < m.items.size(); ++i) m.item_index[m.items[i]] = static_cast<int>(i);
    return m;
}

}  // namespace tvrec
