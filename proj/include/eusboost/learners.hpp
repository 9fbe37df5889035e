#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eusboost/core.hpp"

namespace eusboost {

enum class LearnerKind { Stump, Tree };

struct WeakLearnerSpec {
    LearnerKind kind = LearnerKind::Tree;
    int max_depth = 3;       // ignored for stumps
    double smoothing = 1.0;  // Laplace constant, in units of one training instance

    int effective_depth() const { return kind == LearnerKind::Stump ? 1 : max_depth; }
    void validate() const;
    bool operator==(const WeakLearnerSpec&) const = default;
};

/// Graded class confidences h(x, +) and h(x, -); they sum to 1.
struct Confidence {
    double positive = 0.5;
    double negative = 0.5;

    double of(ClassLabel y) const { return y == ClassLabel::Positive ? positive : negative; }
    ClassLabel argmax() const {
        return positive >= negative ? ClassLabel::Positive : ClassLabel::Negative;
    }
};

/// Axis-aligned binary tree. Rows with x[feature] <= threshold go left.
class TrainedLearner {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double positive_confidence = 0.5;  // leaves only

        bool is_leaf() const { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    TrainedLearner(std::vector<Node> nodes, std::size_t dim, WeakLearnerSpec spec);

    Confidence predict_confidence(std::span<const double> x) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t dim() const { return dim_; }
    const WeakLearnerSpec& spec() const { return spec_; }

    bool operator==(const TrainedLearner&) const = default;

private:
    std::vector<Node> nodes_;
    std::size_t dim_;
    WeakLearnerSpec spec_;
};

/// Greedy weighted-misclassification tree. Zero-weight rows are ignored
/// entirely, and weights are normalized first, so scaling them has no effect.
/// If only one class carries weight the result is a single smoothed leaf.
TrainedLearner train_weak(const Dataset& ds, std::span<const double> weights,
                          const WeakLearnerSpec& spec);

inline TrainedLearner train_weak(const Dataset& ds, const WeightDistribution& w,
                                 const WeakLearnerSpec& spec) {
    return train_weak(ds, w.values(), spec);
}

Confidence predict_confidence(const TrainedLearner& learner, std::span<const double> x);

}  // namespace eusboost
