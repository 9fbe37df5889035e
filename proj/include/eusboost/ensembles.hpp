#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eusboost/core.hpp"
#include "eusboost/eus.hpp"
#include "eusboost/learners.hpp"

namespace eusboost {

/// The seven compared methods, in report order.
enum class Method { BGG, BST, UNB, RBB, OVB, RUB, EUB };

inline constexpr Method kAllMethods[] = {Method::BGG, Method::BST, Method::UNB, Method::RBB,
                                         Method::OVB, Method::RUB, Method::EUB};

std::string_view method_tag(Method m);
/// Accepts tags in either case ("eub", "EUB").
std::optional<Method> parse_method(std::string_view tag);
bool is_boosting(Method m);

// ---------------------------------------------------------------------------
// AdaBoost.M2, binary specialization. With one wrong label per instance the
// mislabel weight w_{i,y} is a single value per instance and q_t(i, y) = 1.

/// Weight on each instance's single wrong label.
struct MislabelWeights {
    std::vector<double> w;

    static MislabelWeights uniform(std::size_t n);
    void validate() const;
};

struct M2Distribution {
    std::vector<double> total;       // W_i
    std::vector<double> label_share; // q_i
    WeightDistribution distribution; // D_i = W_i / sum W
};

M2Distribution m2_distribution(const MislabelWeights& w);

/// D restricted to `subset` and renormalized; zero elsewhere.
/// Throws DegenerateError when the subset carries no mass.
WeightDistribution restrict_weights(const WeightDistribution& d, std::span<const std::size_t> subset);

/// h(x_i, y_i) and h(x_i, wrong label) for one instance.
struct LabelConfidence {
    double correct = 0.5;
    double wrong = 0.5;
};

std::vector<LabelConfidence> label_confidences(const TrainedLearner& h, const Dataset& ds);

/// 1/2 * sum_i D(i) * (1 - h(x_i, y_i) + h(x_i, wrong)).
double pseudo_loss(const WeightDistribution& d, std::span<const LabelConfidence> h);

inline constexpr double kMinEpsilon = 1e-10;

/// eps / (1 - eps), with eps clamped below at kMinEpsilon. Requires eps < 0.5.
double beta(double epsilon);

/// w_i * beta^(1/2 * (1 + h(x_i, y_i) - h(x_i, wrong))).
MislabelWeights update_mislabel_weights(const MislabelWeights& w, double beta,
                                        std::span<const LabelConfidence> h);

// ---------------------------------------------------------------------------

struct BoostedRound {
    TrainedLearner learner;
    double beta;
};

struct RoundTelemetry {
    double epsilon = 0.0;
    double beta = 0.0;
    std::size_t subset_size = 0;
    std::size_t retries = 0;
};

struct BoostedEnsemble {
    std::vector<BoostedRound> rounds;
    std::vector<RoundTelemetry> telemetry;
};

struct BaggedMember {
    TrainedLearner learner;
    std::vector<std::size_t> sample_ids;
};

struct BaggedEnsemble {
    std::vector<BaggedMember> members;
};

using Model = std::variant<BoostedEnsemble, BaggedEnsemble>;

struct Prediction {
    ClassLabel label;
    double score;  // positive-class vote share in [0, 1]
};

/// Log-weighted confidence vote; ties go to the positive class.
Prediction predict(const BoostedEnsemble& model, std::span<const double> x);
/// Majority vote of member argmaxes; ties go to the positive class.
Prediction predict(const BaggedEnsemble& model, std::span<const double> x);
Prediction predict(const Model& model, std::span<const double> x);

std::vector<ClassLabel> predict_labels(const Model& model, const Dataset& ds);

// ---------------------------------------------------------------------------

/// What a boosting round looked like, for callers checking invariants.
/// `restricted` and `subset` are null for plain AdaBoost.
struct RoundTrace {
    std::size_t round;
    const WeightDistribution& distribution;
    const WeightDistribution* restricted;
    std::span<const std::size_t> subset;
    double epsilon;
    double beta;
};

using RoundObserver = std::function<void(const RoundTrace&)>;

struct BoostingOptions {
    std::size_t rounds = 10;
    WeakLearnerSpec learner;
    EusConfig eus;
    std::size_t max_retries = 10;
    RoundObserver observer;
};

BoostedEnsemble train_eusboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng);
BoostedEnsemble train_rusboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng);
/// Resampling AdaBoost: bootstrap by weight, 0/1 weighted error on the full
/// set, misclassified weights scaled by 1/beta, then renormalized.
BoostedEnsemble train_adaboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng);

struct BaggingOptions {
    std::size_t members = 10;
    WeakLearnerSpec learner;
};

/// method must be one of BGG, UNB, OVB, RBB.
BaggedEnsemble train_bagged(Method method, const Dataset& ds, const BaggingOptions& opts,
                            RandomSource& rng);

/// Hyperparameters shared by every method. `rounds` is T for boosting and
/// the member count for bagging.
struct MethodParams {
    std::size_t rounds = 10;
    WeakLearnerSpec learner;
    EusConfig eus;
    std::size_t max_retries = 10;

    bool operator==(const MethodParams&) const = default;
};

Model train_method(Method method, const Dataset& ds, const MethodParams& params, RandomSource& rng);

}  // namespace eusboost
