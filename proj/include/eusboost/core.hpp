#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eusboost {

/// Binary class tag. Positive always denotes the minority class.
enum class ClassLabel : std::uint8_t { Negative = 0, Positive = 1 };

inline ClassLabel opposite(ClassLabel y) {
    return y == ClassLabel::Positive ? ClassLabel::Negative : ClassLabel::Positive;
}

/// Raw label strings as they appeared in the source data.
struct LabelNames {
    std::string positive;
    std::string negative;

    const std::string& name_of(ClassLabel y) const {
        return y == ClassLabel::Positive ? positive : negative;
    }
    bool operator==(const LabelNames&) const = default;
};

struct InstanceView {
    std::span<const double> features;
    ClassLabel label;
    std::size_t id;
};

/// Immutable feature matrix (row-major) with binary labels. Instance ids are
/// row positions 0..n-1.
class Dataset {
public:
    /// Validates shape and finiteness; throws DataError naming the offending row.
    Dataset(std::vector<double> features, std::size_t dim, std::vector<ClassLabel> labels,
            LabelNames names);

    std::size_t size() const { return labels_.size(); }
    std::size_t dim() const { return dim_; }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * dim_, dim_};
    }
    ClassLabel label(std::size_t i) const { return labels_[i]; }
    InstanceView instance(std::size_t i) const { return {row(i), labels_[i], i}; }

    const std::vector<ClassLabel>& labels() const { return labels_; }
    const std::vector<double>& features() const { return features_; }
    const LabelNames& label_names() const { return names_; }

    std::size_t count(ClassLabel y) const;
    bool has_both_classes() const {
        return count(ClassLabel::Positive) > 0 && count(ClassLabel::Negative) > 0;
    }

    /// Rows `ids` (in the given order, repeats allowed) as a new dataset with
    /// the same label designation. Ids of the result are positions in `ids`.
    Dataset subset(std::span<const std::size_t> ids) const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<double> features_;
    std::size_t dim_;
    std::vector<ClassLabel> labels_;
    LabelNames names_;
};

/// Builds a dataset from raw rows and label strings. The class with fewer rows
/// becomes positive; on a tie the lexicographically smaller label does.
Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& labels);

/// n_negative / n_positive. Throws DegenerateError when a class is absent.
double imbalance_ratio(const Dataset& ds);

struct ClassPartition {
    std::vector<std::size_t> minority;
    std::vector<std::size_t> majority;
};

/// Positive (minority) ids and negative (majority) ids, each in id order.
ClassPartition partition_by_class(const Dataset& ds);

/// Stable 64-bit fingerprint of dataset contents, as 16 lowercase hex digits.
std::string fingerprint(const Dataset& ds);

/// Per-instance weights: non-negative, summing to 1.
class WeightDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Validates non-negativity and unit sum.
    explicit WeightDistribution(std::vector<double> weights);

    static WeightDistribution uniform(std::size_t n);
    /// Normalizes non-negative weights; throws DegenerateError if all are zero.
    static WeightDistribution normalized(std::span<const double> raw);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> values() const { return weights_; }

private:
    std::vector<double> weights_;
};

/// Seeded random stream. Child streams are derived from (seed, stream path) alone,
/// so each consumer sees the same draws regardless of execution order.
///
/// Only the engine (mt19937_64, whose output is fixed by the standard) and the
/// transforms below are used; standard distributions are avoided because their
/// output is implementation-defined.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::string stream = "root");

    RandomSource substream(std::string_view name) const;

    std::uint64_t seed() const { return seed_; }
    const std::string& stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound), unbiased. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::string stream_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace eusboost
