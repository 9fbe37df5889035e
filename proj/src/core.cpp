#include "eusboost/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "eusboost/errors.hpp"

namespace eusboost {

Dataset::Dataset(std::vector<double> features, std::size_t dim, std::vector<ClassLabel> labels,
                 LabelNames names)
    : features_(std::move(features)), dim_(dim), labels_(std::move(labels)), names_(std::move(names)) {
    if (labels_.empty()) throw DataError("dataset has no instances");
    if (dim_ == 0) throw DataError("dataset has zero feature columns");
    if (features_.size() != labels_.size() * dim_)
        throw DataError("feature matrix size does not match n * d");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        for (double v : row(i)) {
            if (!std::isfinite(v)) throw DataError("non-finite feature value", i);
        }
    }
}

std::size_t Dataset::count(ClassLabel y) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

Dataset Dataset::subset(std::span<const std::size_t> ids) const {
    std::vector<double> feats;
    feats.reserve(ids.size() * dim_);
    std::vector<ClassLabel> labs;
    labs.reserve(ids.size());
    for (std::size_t id : ids) {
        if (id >= size()) throw std::out_of_range("subset id out of range");
        auto r = row(id);
        feats.insert(feats.end(), r.begin(), r.end());
        labs.push_back(labels_[id]);
    }
    return Dataset(std::move(feats), dim_, std::move(labs), names_);
}

Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& labels) {
    if (rows.empty()) throw DataError("no rows");
    if (rows.size() != labels.size()) throw DataError("row count differs from label count");
    const std::size_t dim = rows.front().size();
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw DataError("dimension mismatch: row " + std::to_string(i) + " has " +
                                std::to_string(rows[i].size()) + " features, expected " +
                                std::to_string(dim),
                            i);
        for (double v : rows[i]) {
            if (!std::isfinite(v))
                throw DataError("non-finite feature in row " + std::to_string(i), i);
        }
        ++counts[labels[i]];
    }
    if (counts.size() != 2)
        throw DataError("expected exactly two distinct labels, found " +
                        std::to_string(counts.size()));

    // std::map iterates in lexicographic order, so `first` wins ties.
    auto first = counts.begin();
    auto second = std::next(first);
    const bool first_is_positive = first->second <= second->second;
    LabelNames names = first_is_positive ? LabelNames{first->first, second->first}
                                         : LabelNames{second->first, first->first};

    std::vector<double> feats;
    feats.reserve(rows.size() * dim);
    std::vector<ClassLabel> labs;
    labs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        feats.insert(feats.end(), rows[i].begin(), rows[i].end());
        labs.push_back(labels[i] == names.positive ? ClassLabel::Positive : ClassLabel::Negative);
    }
    return Dataset(std::move(feats), dim, std::move(labs), std::move(names));
}

double imbalance_ratio(const Dataset& ds) {
    const auto pos = ds.count(ClassLabel::Positive);
    const auto neg = ds.count(ClassLabel::Negative);
    if (pos == 0 || neg == 0) throw DegenerateError("imbalance ratio needs both classes present");
    return static_cast<double>(neg) / static_cast<double>(pos);
}

ClassPartition partition_by_class(const Dataset& ds) {
    ClassPartition part;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        (ds.label(i) == ClassLabel::Positive ? part.minority : part.majority).push_back(i);
    }
    return part;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t hash_u64(std::uint64_t v, std::uint64_t h) {
    char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    return fnv1a64({buf, 8}, h);
}

}  // namespace

std::string fingerprint(const Dataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = hash_u64(ds.size(), h);
    h = hash_u64(ds.dim(), h);
    for (double v : ds.features()) h = hash_u64(std::bit_cast<std::uint64_t>(v), h);
    for (ClassLabel y : ds.labels()) h = hash_u64(static_cast<std::uint64_t>(y), h);
    h = fnv1a64(ds.label_names().positive, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(ds.label_names().negative, h);
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

WeightDistribution::WeightDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("weight distribution is empty");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weights must be finite and non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw std::invalid_argument("weights must sum to 1");
}

WeightDistribution WeightDistribution::uniform(std::size_t n) {
    return WeightDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightDistribution WeightDistribution::normalized(std::span<const double> raw) {
    double sum = 0.0;
    for (double w : raw) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weights must be finite and non-negative");
        sum += w;
    }
    if (sum <= 0.0) throw DegenerateError("all weights are zero");
    std::vector<double> out(raw.begin(), raw.end());
    for (double& w : out) w /= sum;
    return WeightDistribution(std::move(out));
}

RandomSource::RandomSource(std::uint64_t seed, std::string stream)
    : seed_(seed),
      stream_(std::move(stream)),
      engine_(splitmix64(seed ^ splitmix64(fnv1a64(stream_)))) {}

RandomSource RandomSource::substream(std::string_view name) const {
    std::string child = stream_;
    child += '/';
    child += name;
    return RandomSource(seed_, std::move(child));
}

double RandomSource::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    // Rejection on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

double RandomSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace eusboost
