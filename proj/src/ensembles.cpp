#include "eusboost/ensembles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eusboost/errors.hpp"
#include "eusboost/sampling.hpp"

namespace eusboost {

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::BGG: return "BGG";
        case Method::BST: return "BST";
        case Method::UNB: return "UNB";
        case Method::RBB: return "RBB";
        case Method::OVB: return "OVB";
        case Method::RUB: return "RUB";
        case Method::EUB: return "EUB";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view tag) {
    std::string upper(tag);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Method m : kAllMethods) {
        if (method_tag(m) == upper) return m;
    }
    return std::nullopt;
}

bool is_boosting(Method m) {
    return m == Method::BST || m == Method::RUB || m == Method::EUB;
}

MislabelWeights MislabelWeights::uniform(std::size_t n) {
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void MislabelWeights::validate() const {
    if (w.empty()) throw std::invalid_argument("mislabel weights are empty");
    bool any = false;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("mislabel weights must be finite and non-negative");
        any = any || v > 0.0;
    }
    if (!any) throw DegenerateError("all mislabel weights are zero");
}

M2Distribution m2_distribution(const MislabelWeights& w) {
    w.validate();
    // One wrong label per instance: W_i is that label's weight and q_i = 1.
    std::vector<double> total = w.w;
    std::vector<double> share(w.w.size(), 1.0);
    auto dist = WeightDistribution::normalized(total);
    return {std::move(total), std::move(share), std::move(dist)};
}

WeightDistribution restrict_weights(const WeightDistribution& d, std::span<const std::size_t> subset) {
    if (subset.empty()) throw std::invalid_argument("restriction subset is empty");
    std::vector<double> out(d.size(), 0.0);
    for (std::size_t id : subset) {
        if (id >= d.size()) throw std::out_of_range("restriction id out of range");
        out[id] = d[id];
    }
    double mass = 0.0;
    for (double v : out) mass += v;
    if (mass <= 0.0) throw DegenerateError("restriction subset carries no weight");
    for (double& v : out) v /= mass;
    return WeightDistribution(std::move(out));
}

std::vector<LabelConfidence> label_confidences(const TrainedLearner& h, const Dataset& ds) {
    std::vector<LabelConfidence> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Confidence c = h.predict_confidence(ds.row(i));
        const ClassLabel y = ds.label(i);
        out.push_back({c.of(y), c.of(opposite(y))});
    }
    return out;
}

double pseudo_loss(const WeightDistribution& d, std::span<const LabelConfidence> h) {
    if (h.size() != d.size()) throw std::invalid_argument("confidence count does not match weights");
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) sum += d[i] * (1.0 - h[i].correct + h[i].wrong);
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

double beta(double epsilon) {
    if (!(epsilon < 0.5)) throw std::invalid_argument("beta requires epsilon < 0.5");
    const double e = std::max(epsilon, kMinEpsilon);
    return e / (1.0 - e);
}

MislabelWeights update_mislabel_weights(const MislabelWeights& w, double b,
                                        std::span<const LabelConfidence> h) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (h.size() != w.w.size()) throw std::invalid_argument("confidence count does not match weights");
    MislabelWeights out = w;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double exponent = 0.5 * (1.0 + h[i].correct - h[i].wrong);
        out.w[i] *= std::pow(b, exponent);
    }
    return out;
}

Prediction predict(const BoostedEnsemble& model, std::span<const double> x) {
    if (model.rounds.empty()) throw std::invalid_argument("boosted ensemble has no rounds");
    double pos = 0.0;
    double total = 0.0;
    for (const auto& round : model.rounds) {
        const double vote = std::log(1.0 / round.beta);
        pos += vote * round.learner.predict_confidence(x).positive;
        total += vote;
    }
    const double score = std::clamp(pos / total, 0.0, 1.0);
    // Binary confidences sum to one, so comparing shares equals comparing votes.
    return {pos >= total - pos ? ClassLabel::Positive : ClassLabel::Negative, score};
}

Prediction predict(const BaggedEnsemble& model, std::span<const double> x) {
    if (model.members.empty()) throw std::invalid_argument("bagged ensemble has no members");
    std::size_t pos = 0;
    for (const auto& m : model.members) {
        if (m.learner.predict_confidence(x).argmax() == ClassLabel::Positive) ++pos;
    }
    const std::size_t n = model.members.size();
    return {2 * pos >= n ? ClassLabel::Positive : ClassLabel::Negative,
            static_cast<double>(pos) / static_cast<double>(n)};
}

Prediction predict(const Model& model, std::span<const double> x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

std::vector<ClassLabel> predict_labels(const Model& model, const Dataset& ds) {
    std::vector<ClassLabel> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(predict(model, ds.row(i)).label);
    return out;
}

namespace {

void require_trainable(const Dataset& ds, std::size_t rounds) {
    if (rounds < 1) throw std::invalid_argument("at least one round is required");
    if (!ds.has_both_classes()) throw DegenerateError("training needs both classes present");
}

/// Selects the round's training subset S'.
using SubsetSampler =
    std::function<std::vector<std::size_t>(std::size_t round, RandomSource& rng)>;
using AcceptHook = std::function<void()>;

BoostedEnsemble boost_m2(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng,
                         const SubsetSampler& sampler, const AcceptHook& on_accept) {
    require_trainable(ds, opts.rounds);
    opts.learner.validate();
    BoostedEnsemble model;
    auto weights = MislabelWeights::uniform(ds.size());

    for (std::size_t t = 0; t < opts.rounds; ++t) {
        const M2Distribution m2 = m2_distribution(weights);
        bool accepted = false;
        for (std::size_t attempt = 0; attempt <= opts.max_retries && !accepted; ++attempt) {
            RandomSource round_rng =
                rng.substream("round-" + std::to_string(t) + "/attempt-" + std::to_string(attempt));
            const std::vector<std::size_t> subset = sampler(t, round_rng);
            std::optional<WeightDistribution> restricted;
            try {
                restricted.emplace(restrict_weights(m2.distribution, subset));
            } catch (const DegenerateError&) {
                continue;
            }
            TrainedLearner h = train_weak(ds, *restricted, opts.learner);
            const auto conf = label_confidences(h, ds);
            const double eps = pseudo_loss(m2.distribution, conf);
            if (!(eps < 0.5)) continue;

            const double b = beta(eps);
            if (opts.observer)
                opts.observer({t, m2.distribution, &*restricted, subset, eps, b});
            weights = update_mislabel_weights(weights, b, conf);
            // D_t depends only on relative weights; rescaling keeps long runs
            // away from underflow.
            {
                const auto d = WeightDistribution::normalized(weights.w);
                weights.w.assign(d.values().begin(), d.values().end());
            }
            model.rounds.push_back({std::move(h), b});
            model.telemetry.push_back({eps, b, subset.size(), attempt});
            if (on_accept) on_accept();
            accepted = true;
        }
        if (!accepted) break;
    }
    if (model.rounds.empty())
        throw DegenerateError("no boosting round reached pseudo-loss below 0.5");
    return model;
}

}  // namespace

BoostedEnsemble train_eusboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng) {
    require_trainable(ds, opts.rounds);
    opts.eus.validate();
    EusContext ctx(ds);
    Chromosome last;
    auto sampler = [&](std::size_t, RandomSource& r) {
        last = evolve(opts.eus, ctx, r).best;
        return materialize_subset(ds, last).source_ids;
    };
    auto on_accept = [&] { ctx.add_prior_mask(last); };
    return boost_m2(ds, opts, rng, sampler, on_accept);
}

BoostedEnsemble train_rusboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng) {
    auto sampler = [&](std::size_t, RandomSource& r) { return random_undersample(ds, r).ids; };
    return boost_m2(ds, opts, rng, sampler, {});
}

BoostedEnsemble train_adaboost(const Dataset& ds, const BoostingOptions& opts, RandomSource& rng) {
    require_trainable(ds, opts.rounds);
    opts.learner.validate();
    const std::size_t n = ds.size();
    BoostedEnsemble model;
    auto weights = WeightDistribution::uniform(n);

    for (std::size_t t = 0; t < opts.rounds; ++t) {
        bool accepted = false;
        for (std::size_t attempt = 0; attempt <= opts.max_retries && !accepted; ++attempt) {
            RandomSource round_rng =
                rng.substream("round-" + std::to_string(t) + "/attempt-" + std::to_string(attempt));
            const SampleResult sample = weighted_bootstrap(ds, weights.values(), n, round_rng);
            TrainedLearner h = train_weak(ds, sample.frequency_weights(n), opts.learner);

            std::vector<std::uint8_t> wrong(n, 0);
            double error = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (h.predict_confidence(ds.row(i)).argmax() != ds.label(i)) {
                    wrong[i] = 1;
                    error += weights[i];
                }
            }
            error = std::clamp(error, 0.0, 1.0);
            if (!(error < 0.5)) continue;

            const double b = beta(error);
            if (opts.observer) opts.observer({t, weights, nullptr, {}, error, b});
            std::vector<double> next(weights.values().begin(), weights.values().end());
            for (std::size_t i = 0; i < n; ++i) {
                if (wrong[i]) next[i] /= b;
            }
            weights = WeightDistribution::normalized(next);
            model.rounds.push_back({std::move(h), b});
            model.telemetry.push_back({error, b, n, attempt});
            accepted = true;
        }
        if (!accepted) break;
    }
    if (model.rounds.empty())
        throw DegenerateError("no boosting round reached weighted error below 0.5");
    return model;
}

BaggedEnsemble train_bagged(Method method, const Dataset& ds, const BaggingOptions& opts,
                            RandomSource& rng) {
    require_trainable(ds, opts.members);
    opts.learner.validate();
    const auto part = partition_by_class(ds);
    BaggedEnsemble model;
    for (std::size_t k = 0; k < opts.members; ++k) {
        RandomSource member_rng = rng.substream("member-" + std::to_string(k));
        SampleResult sample;
        switch (method) {
            case Method::BGG:
                sample = weighted_bootstrap(ds, WeightDistribution::uniform(ds.size()).values(),
                                            ds.size(), member_rng);
                break;
            case Method::UNB:
                sample = random_undersample(ds, member_rng);
                break;
            case Method::OVB:
                sample = random_oversample(ds, member_rng);
                break;
            case Method::RBB: {
                sample.ids = part.minority;
                const std::size_t count =
                    roughly_balanced_majority_count(part.minority.size(), member_rng);
                for (std::size_t c = 0; c < count; ++c)
                    sample.ids.push_back(part.majority[member_rng.below(part.majority.size())]);
                break;
            }
            default:
                throw std::invalid_argument("train_bagged: not a bagging method");
        }
        TrainedLearner h = train_weak(ds, sample.frequency_weights(ds.size()), opts.learner);
        model.members.push_back({std::move(h), std::move(sample.ids)});
    }
    return model;
}

Model train_method(Method method, const Dataset& ds, const MethodParams& params, RandomSource& rng) {
    if (is_boosting(method)) {
        BoostingOptions opts;
        opts.rounds = params.rounds;
        opts.learner = params.learner;
        opts.eus = params.eus;
        opts.max_retries = params.max_retries;
        switch (method) {
            case Method::BST: return train_adaboost(ds, opts, rng);
            case Method::RUB: return train_rusboost(ds, opts, rng);
            default: return train_eusboost(ds, opts, rng);
        }
    }
    return train_bagged(method, ds, {params.rounds, params.learner}, rng);
}

}  // namespace eusboost
