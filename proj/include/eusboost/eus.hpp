#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "eusboost/core.hpp"

namespace eusboost {

/// Selection mask over the majority class: bit j keeps the j-th majority
/// instance (in id order). At least one bit must be set.
class Chromosome {
public:
    Chromosome() = default;
    explicit Chromosome(std::vector<std::uint8_t> bits);

    static Chromosome all_ones(std::size_t n);
    /// Low `n` bits of `code`, bit j -> position j.
    static Chromosome from_code(std::uint64_t code, std::size_t n);

    std::size_t size() const { return bits_.size(); }
    bool test(std::size_t j) const { return bits_[j] != 0; }
    void set(std::size_t j, bool on) { bits_[j] = on ? 1 : 0; }
    void flip(std::size_t j) { bits_[j] ^= 1; }
    std::size_t selected() const;
    bool valid() const { return selected() > 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    /// Fraction of positions where the two masks differ.
    double normalized_hamming(const Chromosome& other) const;

    auto operator<=>(const Chromosome&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct EusConfig {
    std::size_t population = 50;
    double penalty = 0.2;           // weight of the |1 - n_sel / n_min| balance term
    double diversity_weight = 0.25; // blend towards distance from earlier rounds' masks
    double crossover_rate = 0.8;
    std::optional<double> mutation_rate;  // per bit; defaults to 1 / n_maj
    std::size_t max_evaluations = 5000;
    std::size_t elitism = 1;

    void validate() const;
    double mutation_rate_for(std::size_t n_maj) const;
    bool operator==(const EusConfig&) const = default;
};

/// Search state shared by every evaluation for one dataset: the class split,
/// nearest-neighbour orderings, and masks chosen in earlier boosting rounds.
class EusContext {
public:
    explicit EusContext(const Dataset& ds);

    const Dataset& dataset() const { return ds_; }
    const ClassPartition& partition() const { return partition_; }
    std::size_t n_min() const { return partition_.minority.size(); }
    std::size_t n_maj() const { return partition_.majority.size(); }

    const std::vector<Chromosome>& prior_masks() const { return prior_; }
    void add_prior_mask(Chromosome mask);

    /// Leave-one-out 1-NN GM over all minority plus the selected majority.
    /// Euclidean distance; equal distances resolve to the lower instance id.
    double loo_1nn_gm(const Chromosome& chrom) const;

private:
    std::size_t nearest_candidate(std::size_t i, const std::vector<std::uint8_t>& is_candidate) const;

    const Dataset& ds_;
    ClassPartition partition_;
    std::vector<Chromosome> prior_;
    // Row i lists every other instance by ascending (distance, id); empty when
    // the dataset is too large to cache and neighbours are found by scanning.
    std::vector<std::uint32_t> neighbour_order_;
};

double loo_1nn_gm(const Dataset& ds, const Chromosome& chrom);

/// GM - P*|1 - n_sel/n_min|, blended with the minimum normalized Hamming
/// distance to prior masks when any exist. An undefined GM scores base 0.
double fitness(const Chromosome& chrom, const EusConfig& cfg, const EusContext& ctx);

/// True when `a` ranks above `b`: higher fitness, then fewer selected bits,
/// then lexicographically smaller mask.
bool ranks_above(double fit_a, const Chromosome& a, double fit_b, const Chromosome& b);

struct EusResult {
    Chromosome best;
    double fitness = 0.0;
    std::size_t evaluations = 0;
    double best_initial_fitness = 0.0;
};

/// Generational GA with binary tournaments, uniform crossover, bit-flip
/// mutation and elitism. Returns the best chromosome ever evaluated.
EusResult evolve(const EusConfig& cfg, const EusContext& ctx, RandomSource& rng);

/// Enumerates every non-empty mask (n_maj <= 16) with the same ranking as evolve.
std::pair<Chromosome, double> exhaustive_best(const EusConfig& cfg, const EusContext& ctx);

struct Subset {
    Dataset data;
    std::vector<std::size_t> source_ids;  // source_ids[k] = original id of row k
};

/// All minority instances plus the selected majority ones, in original id order.
Subset materialize_subset(const Dataset& ds, const Chromosome& chrom);

}  // namespace eusboost
