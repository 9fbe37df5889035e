#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eusboost/core.hpp"
#include "eusboost/ensembles.hpp"
#include "eusboost/metrics.hpp"

namespace eusboost {

/// Fold assignment per repeat: assignments[r][id] is the test fold of `id`.
struct FoldPlan {
    std::size_t k = 0;
    std::size_t repeats = 0;
    std::vector<std::vector<std::size_t>> assignments;

    std::vector<std::size_t> test_ids(std::size_t repeat, std::size_t fold) const;
    std::vector<std::size_t> train_ids(std::size_t repeat, std::size_t fold) const;
};

/// Shuffles each class and deals it round-robin into k folds, so every fold
/// holds floor or ceil of (class count / k) instances of each class.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::size_t repeats, RandomSource& rng);

enum class Measure { SEN, GM, AUC };
inline constexpr Measure kReportedMeasures[] = {Measure::SEN, Measure::GM, Measure::AUC};
std::string_view measure_name(Measure m);

struct FoldOutcome {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::optional<ConfusionMatrix> cm;  // empty when training degenerated
    std::optional<double> sen;
    std::optional<double> gm;
    std::optional<double> auc;

    std::optional<double> value(Measure m) const;
};

struct MethodResult {
    Method method;
    std::vector<FoldOutcome> folds;  // ordered by (repeat, fold)

    std::vector<std::optional<double>> values(Measure m) const;
    std::optional<double> mean(Measure m) const;
    /// Folds whose value for `m` was undefined and left out of the mean.
    std::size_t missing(Measure m) const;
};

struct MethodSpec {
    Method method;
    MethodParams params;
};

/// Trains on k-1 folds and scores the held-out fold, for every (repeat, fold).
/// Each fold draws from its own substream, so `jobs` never changes results.
MethodResult cross_validate(const MethodSpec& spec, const Dataset& ds, const FoldPlan& plan,
                            const RandomSource& rng, std::size_t jobs = 1);

enum class Sidedness { TwoSided, Greater, Less };

/// Wilcoxon signed-rank p-value for paired samples. Zero differences are
/// dropped and tied magnitudes share average ranks. Exact null distribution
/// for up to 20 non-zero differences, normal approximation with continuity
/// correction beyond. `Greater` tests a > b.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                            Sidedness sided = Sidedness::TwoSided);

inline constexpr std::size_t kWilcoxonExactLimit = 20;

struct HypothesisResult {
    Method other;
    Measure measure;
    double p_value;
    bool eub_at_least_as_good;  // EUB mean >= other mean
};

struct ComparisonReport {
    struct PairRow {
        Method other;
        std::array<std::optional<HypothesisResult>, 3> cells;  // SEN, GM, AUC; empty = n/a
    };

    std::vector<MethodResult> results;
    std::vector<PairRow> pairs;
    std::size_t k = 0;
    std::size_t repeats = 0;
    Sidedness sided = Sidedness::TwoSided;
    WeakLearnerSpec learner;

    /// Human-readable tables: overall means as percentages, then pairwise tests.
    std::string render_text() const;
    /// Long-format CSV: table,subject,measure,value,direction.
    std::string render_csv() const;
};

/// Runs every method on the same fold plan and tests EUB against each other method.
ComparisonReport compare(std::span<const Method> methods, const MethodParams& params,
                         const Dataset& ds, const FoldPlan& plan, const RandomSource& rng,
                         std::size_t jobs = 1, Sidedness sided = Sidedness::TwoSided);

/// "EUB | 92.19 | 92.52 | 93.88" from fractions in [0, 1].
std::string format_overall_row(Method m, std::optional<double> sen, std::optional<double> gm,
                               std::optional<double> auc);
/// "+ (0.0031)", "- (0.4100)" or "n/a".
std::string format_pair_cell(const std::optional<HypothesisResult>& cell);

}  // namespace eusboost
