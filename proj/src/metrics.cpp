#include "eusboost/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "eusboost/errors.hpp"

namespace eusboost {

namespace {

double ratio(std::uint64_t num, std::uint64_t den, const char* what) {
    if (den == 0) throw UndefinedMetricError(what);
    return static_cast<double>(num) / static_cast<double>(den);
}

template <typename F>
std::optional<double> try_metric(F&& f) {
    try {
        return f();
    } catch (const UndefinedMetricError&) {
        return std::nullopt;
    }
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predicted,
                                 std::span<const ClassLabel> actual) {
    if (predicted.size() != actual.size())
        throw std::invalid_argument("predicted and actual label counts differ");
    if (predicted.empty()) throw std::invalid_argument("no labels to compare");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const bool pred_pos = predicted[i] == ClassLabel::Positive;
        if (actual[i] == ClassLabel::Positive)
            ++(pred_pos ? cm.tp : cm.fn);
        else
            ++(pred_pos ? cm.fp : cm.tn);
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    return ratio(cm.tp + cm.tn, cm.total(), "accuracy undefined: empty confusion matrix");
}

double sensitivity(const ConfusionMatrix& cm) {
    return ratio(cm.tp, cm.tp + cm.fn, "sensitivity undefined: no actual positives");
}

double specificity(const ConfusionMatrix& cm) {
    return ratio(cm.tn, cm.tn + cm.fp, "specificity undefined: no actual negatives");
}

double precision(const ConfusionMatrix& cm) {
    return ratio(cm.tp, cm.tp + cm.fp, "precision undefined: no predicted positives");
}

double false_positive_rate(const ConfusionMatrix& cm) {
    return ratio(cm.fp, cm.tn + cm.fp, "false positive rate undefined: no actual negatives");
}

double geometric_mean(const ConfusionMatrix& cm) {
    return std::sqrt(specificity(cm) * sensitivity(cm));
}

double auc_single_point(const ConfusionMatrix& cm) {
    return (1.0 + sensitivity(cm) - false_positive_rate(cm)) / 2.0;
}

double f_measure(const ConfusionMatrix& cm) {
    const double recall = sensitivity(cm);
    const double prec = precision(cm);
    if (recall + prec == 0.0) return 0.0;
    return 2.0 * recall * prec / (recall + prec);
}

MetricBlock all_metrics(const ConfusionMatrix& cm) {
    MetricBlock b;
    b.cm = cm;
    b.accuracy = try_metric([&] { return accuracy(cm); });
    b.sensitivity = try_metric([&] { return sensitivity(cm); });
    b.specificity = try_metric([&] { return specificity(cm); });
    b.precision = try_metric([&] { return precision(cm); });
    b.geometric_mean = try_metric([&] { return geometric_mean(cm); });
    b.auc = try_metric([&] { return auc_single_point(cm); });
    b.f_measure = try_metric([&] { return f_measure(cm); });
    return b;
}

}  // namespace eusboost
