#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "eusboost/core.hpp"

namespace eusboost {

/// Two-class confusion counts; positive is the minority class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fn + fp + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predicted,
                                 std::span<const ClassLabel> actual);

// Each measure throws UndefinedMetricError when its denominator is zero.
double accuracy(const ConfusionMatrix& cm);
double sensitivity(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double false_positive_rate(const ConfusionMatrix& cm);
double geometric_mean(const ConfusionMatrix& cm);
/// Single operating-point AUC, (1 + TPR - FPR) / 2.
double auc_single_point(const ConfusionMatrix& cm);
/// Harmonic mean of recall and precision; 0 when both are 0.
double f_measure(const ConfusionMatrix& cm);

/// Every measure at once, with undefined ones left empty.
struct MetricBlock {
    ConfusionMatrix cm;
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> geometric_mean;
    std::optional<double> auc;
    std::optional<double> f_measure;
};

MetricBlock all_metrics(const ConfusionMatrix& cm);

}  // namespace eusboost
