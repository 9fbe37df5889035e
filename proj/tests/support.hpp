#pragma once

// Dataset builders and brute-force oracles shared by the unit and acceptance
// tests. The oracles deliberately avoid the library's own helpers.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eusboost/core.hpp"

namespace eusboost::testing {

inline Dataset make_1d(const std::vector<double>& xs, const std::vector<int>& positive) {
    std::vector<ClassLabel> y;
    for (int p : positive) y.push_back(p ? ClassLabel::Positive : ClassLabel::Negative);
    return Dataset(xs, 1, std::move(y), LabelNames{"pos", "neg"});
}

/// Gaussian blobs, positives shifted by `shift` on every axis. Rows are
/// shuffled so class membership is not tied to id order.
inline Dataset random_dataset(std::uint64_t seed, std::size_t n_pos, std::size_t n_neg,
                              std::size_t dim, double shift) {
    RandomSource rng(seed, "test-data");
    std::vector<std::size_t> order(n_pos + n_neg);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<double> f((n_pos + n_neg) * dim);
    std::vector<ClassLabel> y(n_pos + n_neg);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t row = order[k];
        const bool pos = k < n_pos;
        y[row] = pos ? ClassLabel::Positive : ClassLabel::Negative;
        for (std::size_t j = 0; j < dim; ++j) f[row * dim + j] = rng.normal() + (pos ? shift : 0.0);
    }
    return Dataset(std::move(f), dim, std::move(y), LabelNames{"pos", "neg"});
}

/// Leave-one-out 1-NN GM by direct scan. Ties on distance go to the lower id.
/// Returns NaN when GM is undefined.
inline double oracle_loo_gm(const Dataset& ds, const std::vector<std::uint8_t>& keep_majority) {
    std::vector<std::size_t> cand;
    std::size_t maj_index = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.label(i) == ClassLabel::Positive) {
            cand.push_back(i);
        } else {
            if (keep_majority[maj_index]) cand.push_back(i);
            ++maj_index;
        }
    }
    double tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i : cand) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_id = 0;
        for (std::size_t j : cand) {
            if (j == i) continue;
            double d = 0;
            for (std::size_t c = 0; c < ds.dim(); ++c) {
                const double diff = ds.row(i)[c] - ds.row(j)[c];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                best_id = j;
            }
        }
        const bool pred_pos = ds.label(best_id) == ClassLabel::Positive;
        const bool is_pos = ds.label(i) == ClassLabel::Positive;
        if (is_pos) (pred_pos ? tp : fn) += 1;
        else (pred_pos ? fp : tn) += 1;
    }
    if (tp + fn == 0 || tn + fp == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(tp / (tp + fn) * (tn / (tn + fp)));
}

/// GM minus the balance penalty, optionally blended with distance to prior masks.
inline double oracle_fitness(const Dataset& ds, const std::vector<std::uint8_t>& mask, double penalty,
                             double lambda, const std::vector<std::vector<std::uint8_t>>& priors) {
    double gm = oracle_loo_gm(ds, mask);
    if (std::isnan(gm)) gm = 0.0;
    double n_min = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) n_min += ds.label(i) == ClassLabel::Positive;
    double n_sel = 0;
    for (auto b : mask) n_sel += b;
    const double base = gm - penalty * std::abs(1.0 - n_sel / n_min);
    if (priors.empty()) return base;
    double closest = 1.0;
    for (const auto& p : priors) {
        double diff = 0;
        for (std::size_t j = 0; j < mask.size(); ++j) diff += (mask[j] != p[j]);
        closest = std::min(closest, diff / static_cast<double>(mask.size()));
    }
    return (1.0 - lambda) * base + lambda * closest;
}

enum class Tail { Two, Greater, Less };

/// Exact signed-rank p-value by visiting all 2^n sign patterns of the non-zero
/// differences. Ranks are doubled so every comparison is on integers.
inline double oracle_wilcoxon(const std::vector<double>& a, const std::vector<double>& b, Tail tail) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    const std::size_t n = d.size();
    std::vector<long long> r2(n);
    for (std::size_t i = 0; i < n; ++i) {
        long long below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) ++below;
            else if (std::abs(d[j]) == std::abs(d[i])) ++equal;
        }
        r2[i] = 2 * below + equal + 1;
    }
    long long total = 0, observed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += r2[i];
        if (d[i] > 0) observed += r2[i];
    }
    unsigned long long hits = 0;
    for (unsigned long long pattern = 0; pattern < (1ULL << n); ++pattern) {
        long long s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (pattern >> i & 1ULL) s += r2[i];
        bool extreme = false;
        if (tail == Tail::Greater) extreme = s >= observed;
        else if (tail == Tail::Less) extreme = s <= observed;
        else extreme = std::llabs(2 * s - total) >= std::llabs(2 * observed - total);
        hits += extreme;
    }
    return static_cast<double>(hits) / static_cast<double>(1ULL << n);
}

}  // namespace eusboost::testing
