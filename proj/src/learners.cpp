#include "eusboost/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eusboost/errors.hpp"

namespace eusboost {

namespace {

// Split scores within this distance (in normalized weight mass) count as tied.
constexpr double kScoreTolerance = 1e-12;

struct WeightedRow {
    std::size_t id;
    double weight;
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double error = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, const WeakLearnerSpec& spec, double smoothing_mass)
        : ds_(ds), spec_(spec), smoothing_mass_(smoothing_mass) {}

    int build(std::vector<WeightedRow> rows, int depth) {
        double pos = 0.0;
        double neg = 0.0;
        for (const auto& r : rows) (ds_.label(r.id) == ClassLabel::Positive ? pos : neg) += r.weight;

        if (depth < spec_.effective_depth() && pos > 0.0 && neg > 0.0) {
            const double node_error = std::min(pos, neg);
            SplitChoice best = best_split(rows);
            if (best.feature >= 0 && best.error < node_error - kScoreTolerance) {
                std::vector<WeightedRow> left;
                std::vector<WeightedRow> right;
                for (const auto& r : rows) {
                    (ds_.row(r.id)[best.feature] <= best.threshold ? left : right).push_back(r);
                }
                const int index = static_cast<int>(nodes_.size());
                nodes_.push_back({best.feature, best.threshold, -1, -1, 0.5});
                rows.clear();
                rows.shrink_to_fit();
                const int l = build(std::move(left), depth + 1);
                const int r = build(std::move(right), depth + 1);
                nodes_[index].left = l;
                nodes_[index].right = r;
                return index;
            }
        }
        const int index = static_cast<int>(nodes_.size());
        TrainedLearner::Node leaf;
        leaf.positive_confidence =
            (pos + smoothing_mass_) / (pos + neg + 2.0 * smoothing_mass_);
        nodes_.push_back(leaf);
        return index;
    }

    std::vector<TrainedLearner::Node> take() { return std::move(nodes_); }

private:
    SplitChoice best_split(const std::vector<WeightedRow>& rows) const {
        SplitChoice best;
        best.error = std::numeric_limits<double>::infinity();
        double total_pos = 0.0;
        double total_neg = 0.0;
        for (const auto& r : rows)
            (ds_.label(r.id) == ClassLabel::Positive ? total_pos : total_neg) += r.weight;

        std::vector<WeightedRow> sorted = rows;
        for (std::size_t f = 0; f < ds_.dim(); ++f) {
            std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
                const double va = ds_.row(a.id)[f];
                const double vb = ds_.row(b.id)[f];
                return va < vb || (va == vb && a.id < b.id);
            });
            double left_pos = 0.0;
            double left_neg = 0.0;
            for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
                (ds_.label(sorted[k].id) == ClassLabel::Positive ? left_pos : left_neg) +=
                    sorted[k].weight;
                const double here = ds_.row(sorted[k].id)[f];
                const double next = ds_.row(sorted[k + 1].id)[f];
                if (here == next) continue;
                const double error = std::min(left_pos, left_neg) +
                                     std::min(total_pos - left_pos, total_neg - left_neg);
                // Iteration runs by ascending feature then threshold, so only a
                // clearly lower score displaces the incumbent.
                if (error < best.error - kScoreTolerance) {
                    double mid = here + (next - here) / 2.0;
                    if (!(mid < next)) mid = here;
                    best = {static_cast<int>(f), mid, error};
                }
            }
        }
        return best;
    }

    const Dataset& ds_;
    const WeakLearnerSpec& spec_;
    double smoothing_mass_;
    std::vector<TrainedLearner::Node> nodes_;
};

}  // namespace

void WeakLearnerSpec::validate() const {
    if (kind == LearnerKind::Tree && (max_depth < 1 || max_depth > 10))
        throw std::invalid_argument("tree max_depth must be in [1, 10]");
    if (!(smoothing >= 0.0) || !std::isfinite(smoothing))
        throw std::invalid_argument("smoothing must be finite and non-negative");
}

TrainedLearner::TrainedLearner(std::vector<Node> nodes, std::size_t dim, WeakLearnerSpec spec)
    : nodes_(std::move(nodes)), dim_(dim), spec_(spec) {
    if (nodes_.empty()) throw std::invalid_argument("learner has no nodes");
    const int count = static_cast<int>(nodes_.size());
    for (const auto& n : nodes_) {
        if (n.is_leaf()) {
            if (!(n.positive_confidence >= 0.0 && n.positive_confidence <= 1.0))
                throw std::invalid_argument("leaf confidence outside [0, 1]");
        } else {
            if (static_cast<std::size_t>(n.feature) >= dim_)
                throw std::invalid_argument("split feature index out of range");
            if (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)
                throw std::invalid_argument("split child index out of range");
        }
    }
}

Confidence TrainedLearner::predict_confidence(std::span<const double> x) const {
    if (x.size() != dim_)
        throw std::invalid_argument("expected " + std::to_string(dim_) + " features, got " +
                                    std::to_string(x.size()));
    const Node* node = &nodes_.front();
    // Children always sit after their parent, so this walk terminates.
    while (!node->is_leaf()) {
        node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
    }
    return {node->positive_confidence, 1.0 - node->positive_confidence};
}

Confidence predict_confidence(const TrainedLearner& learner, std::span<const double> x) {
    return learner.predict_confidence(x);
}

TrainedLearner train_weak(const Dataset& ds, std::span<const double> weights,
                          const WeakLearnerSpec& spec) {
    spec.validate();
    if (weights.size() != ds.size())
        throw std::invalid_argument("weight vector length " + std::to_string(weights.size()) +
                                    " does not match dataset size " + std::to_string(ds.size()));
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) throw DegenerateError("all training weights are zero");

    std::vector<WeightedRow> rows;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (weights[i] > 0.0) rows.push_back({i, weights[i] / total});
    }
    const double smoothing_mass = spec.smoothing / static_cast<double>(rows.size());

    TreeBuilder builder(ds, spec, smoothing_mass);
    builder.build(std::move(rows), 0);
    return TrainedLearner(builder.take(), ds.dim(), spec);
}

}  // namespace eusboost
