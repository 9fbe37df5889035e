#pragma once

#include <cstddef>
#include <vector>

#include "eusboost/core.hpp"

namespace eusboost {

/// Ids drawn from a source dataset; repeats mark sampling with replacement.
struct SampleResult {
    std::vector<std::size_t> ids;

    /// Per-instance multiplicity divided by sample size, aligned with the source.
    std::vector<double> frequency_weights(std::size_t source_size) const;
};

/// Every minority id once plus n_min majority ids drawn without replacement.
/// When the majority is the smaller class, all majority ids are taken.
SampleResult random_undersample(const Dataset& ds, RandomSource& rng);

/// Every majority id once plus n_maj minority draws with replacement.
SampleResult random_oversample(const Dataset& ds, RandomSource& rng);

/// `size` i.i.d. draws with probability proportional to `w`.
SampleResult weighted_bootstrap(const Dataset& ds, std::span<const double> w, std::size_t size,
                                RandomSource& rng);

/// Failures before the n_min-th success in fair coin flips, i.e. a
/// NegativeBinomial(n_min, 0.5) draw with mean n_min.
std::size_t roughly_balanced_majority_count(std::size_t n_min, RandomSource& rng);

}  // namespace eusboost
