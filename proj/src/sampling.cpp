#include "eusboost/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eusboost/errors.hpp"

namespace eusboost {

namespace {

void require_both_classes(const ClassPartition& part) {
    if (part.minority.empty() || part.majority.empty())
        throw DegenerateError("sampling needs both classes present");
}

}  // namespace

std::vector<double> SampleResult::frequency_weights(std::size_t source_size) const {
    std::vector<double> w(source_size, 0.0);
    if (ids.empty()) return w;
    const double unit = 1.0 / static_cast<double>(ids.size());
    for (std::size_t id : ids) w.at(id) += unit;
    return w;
}

SampleResult random_undersample(const Dataset& ds, RandomSource& rng) {
    auto part = partition_by_class(ds);
    require_both_classes(part);
    const std::size_t take = std::min(part.minority.size(), part.majority.size());

    // Partial Fisher-Yates: the first `take` slots end up a uniform subset.
    auto& pool = part.majority;
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    SampleResult out;
    out.ids = part.minority;
    out.ids.insert(out.ids.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(out.ids.begin(), out.ids.end());
    return out;
}

SampleResult random_oversample(const Dataset& ds, RandomSource& rng) {
    const auto part = partition_by_class(ds);
    require_both_classes(part);
    SampleResult out;
    out.ids = part.majority;
    for (std::size_t k = 0; k < part.majority.size(); ++k) {
        out.ids.push_back(part.minority[rng.below(part.minority.size())]);
    }
    return out;
}

SampleResult weighted_bootstrap(const Dataset& ds, std::span<const double> w, std::size_t size,
                                RandomSource& rng) {
    if (w.size() != ds.size()) throw std::invalid_argument("weight vector length mismatch");
    if (size == 0) throw std::invalid_argument("bootstrap size must be at least 1");
    std::vector<double> cumulative(w.size());
    double running = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
            throw std::invalid_argument("weights must be finite and non-negative");
        running += w[i];
        cumulative[i] = running;
    }
    if (running <= 0.0) throw DegenerateError("cannot bootstrap from all-zero weights");

    SampleResult out;
    out.ids.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
        // upper_bound skips zero-weight entries, whose cumulative value equals
        // their predecessor's.
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        while (w[static_cast<std::size_t>(it - cumulative.begin())] == 0.0) --it;
        out.ids.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return out;
}

std::size_t roughly_balanced_majority_count(std::size_t n_min, RandomSource& rng) {
    if (n_min == 0) throw std::invalid_argument("n_min must be at least 1");
    std::size_t successes = 0;
    std::size_t failures = 0;
    while (successes < n_min) {
        // One random bit per flip.
        if (rng.next_u64() >> 63)
            ++successes;
        else
            ++failures;
    }
    return failures;
}

}  // namespace eusboost
