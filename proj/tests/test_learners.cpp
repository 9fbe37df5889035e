#include "doctest.h"

#include "eusboost/errors.hpp"
#include "eusboost/learners.hpp"
#include "support.hpp"

using namespace eusboost;
using testing::make_1d;

namespace {

WeakLearnerSpec stump() {
    WeakLearnerSpec s;
    s.kind = LearnerKind::Stump;
    return s;
}

// Same splits in the same places; leaf confidences may differ.
bool same_shape(const TrainedLearner& a, const TrainedLearner& b) {
    if (a.nodes().size() != b.nodes().size()) return false;
    for (std::size_t i = 0; i < a.nodes().size(); ++i) {
        const auto& x = a.nodes()[i];
        const auto& y = b.nodes()[i];
        if (x.feature != y.feature || x.left != y.left || x.right != y.right) return false;
        if (!x.is_leaf() && x.threshold != y.threshold) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("stump separates a 1-D threshold") {
    std::vector<double> xs;
    std::vector<int> pos;
    for (int i = 1; i <= 10; ++i) {
        xs.push_back(i);
        pos.push_back(i > 5);
    }
    auto ds = make_1d(xs, pos);
    auto h = train_weak(ds, WeightDistribution::uniform(10), stump());
    REQUIRE(h.nodes().size() == 3);
    CHECK(h.nodes()[0].feature == 0);
    CHECK(h.nodes()[0].threshold > 5.0);
    CHECK(h.nodes()[0].threshold < 6.0);
    for (std::size_t i = 0; i < ds.size(); ++i)
        CHECK(h.predict_confidence(ds.row(i)).argmax() == ds.label(i));
}

TEST_CASE("leaf confidences are Laplace smoothed") {
    auto ds = make_1d({1, 2, 3, 4, 5}, {0, 0, 1, 1, 1});
    auto h = train_weak(ds, WeightDistribution::uniform(5), stump());
    // smoothing mass 1/5 per class; left leaf holds 0.4 negative, right 0.6 positive
    std::vector<double> lo{1.0}, hi{5.0};
    CHECK(h.predict_confidence(lo).positive == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(h.predict_confidence(hi).positive == doctest::Approx(0.8).epsilon(1e-14));
    auto c = h.predict_confidence(hi);
    CHECK(c.positive + c.negative == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("all weight on one instance gives a single leaf") {
    auto ds = make_1d({1, 2, 3, 4}, {0, 1, 0, 1});
    auto h = train_weak(ds, std::vector<double>{0, 0, 1, 0}, WeakLearnerSpec{});
    REQUIRE(h.nodes().size() == 1);
    std::vector<double> x{3.0};
    CHECK(h.predict_confidence(x).argmax() == ClassLabel::Negative);
    CHECK(h.predict_confidence(x).negative >= 0.5);
}

TEST_CASE("inseparable balanced leaf is undecided") {
    auto ds = make_1d({2, 2}, {0, 1});
    auto h = train_weak(ds, WeightDistribution::uniform(2), WeakLearnerSpec{});
    REQUIRE(h.nodes().size() == 1);
    std::vector<double> x{2.0};
    CHECK(h.predict_confidence(x).positive == 0.5);
    CHECK(h.predict_confidence(x).argmax() == ClassLabel::Positive);
}

TEST_CASE("duplicated row matches doubled weight") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto ds = testing::random_dataset(seed, 8, 20, 2, 1.0);
        const std::size_t dup = seed % ds.size();
        std::vector<std::size_t> ids(ds.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
        ids.push_back(dup);
        auto with_dup = ds.subset(ids);
        std::vector<double> doubled(ds.size(), 1.0);
        doubled[dup] = 2.0;
        auto a = train_weak(with_dup, std::vector<double>(with_dup.size(), 1.0), WeakLearnerSpec{});
        auto b = train_weak(ds, doubled, WeakLearnerSpec{});
        CHECK(same_shape(a, b));
        for (std::size_t i = 0; i < ds.size(); ++i)
            CHECK(a.predict_confidence(ds.row(i)).argmax() == b.predict_confidence(ds.row(i)).argmax());
    }
}

TEST_CASE("zero-weight rows change nothing") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto base = testing::random_dataset(seed, 10, 30, 3, 0.8);
        auto extra = testing::random_dataset(seed + 100, 5, 5, 3, -1.0);
        std::vector<double> f = base.features();
        f.insert(f.end(), extra.features().begin(), extra.features().end());
        std::vector<ClassLabel> y = base.labels();
        y.insert(y.end(), extra.labels().begin(), extra.labels().end());
        Dataset padded(f, 3, y, base.label_names());

        RandomSource rng(seed);
        std::vector<double> w(base.size());
        for (auto& v : w) v = 0.1 + rng.uniform();
        std::vector<double> w_padded = w;
        w_padded.resize(padded.size(), 0.0);

        auto a = train_weak(base, w, WeakLearnerSpec{});
        auto b = train_weak(padded, w_padded, WeakLearnerSpec{});
        CHECK(a.nodes() == b.nodes());
    }
}

TEST_CASE("weight scaling changes nothing") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto ds = testing::random_dataset(seed, 12, 40, 2, 1.0);
        RandomSource rng(seed + 7);
        std::vector<double> w(ds.size()), scaled(ds.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = rng.uniform() + 0.05;
            scaled[i] = w[i] * 37.5;
        }
        auto a = train_weak(ds, w, WeakLearnerSpec{});
        auto b = train_weak(ds, scaled, WeakLearnerSpec{});
        REQUIRE(same_shape(a, b));
        for (std::size_t i = 0; i < a.nodes().size(); ++i)
            CHECK(a.nodes()[i].positive_confidence ==
                  doctest::Approx(b.nodes()[i].positive_confidence).epsilon(1e-12));
    }
}

TEST_CASE("confidences sum to one and depth is bounded") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto ds = testing::random_dataset(seed, 15, 45, 4, 0.5);
        WeakLearnerSpec spec;
        spec.max_depth = 2;
        auto h = train_weak(ds, WeightDistribution::uniform(ds.size()), spec);
        CHECK(h.nodes().size() <= 7);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            auto c = h.predict_confidence(ds.row(i));
            CHECK(c.positive + c.negative == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(c.positive > 0.0);
            CHECK(c.positive < 1.0);
        }
    }
}

TEST_CASE("invalid inputs") {
    auto ds = make_1d({1, 2, 3}, {0, 1, 0});
    CHECK_THROWS_AS(train_weak(ds, std::vector<double>{1, 1}, WeakLearnerSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(train_weak(ds, std::vector<double>{0, 0, 0}, WeakLearnerSpec{}), DegenerateError);
    CHECK_THROWS_AS(train_weak(ds, std::vector<double>{1, -1, 1}, WeakLearnerSpec{}), std::invalid_argument);
    WeakLearnerSpec deep;
    deep.max_depth = 11;
    CHECK_THROWS_AS(train_weak(ds, WeightDistribution::uniform(3), deep), std::invalid_argument);
    auto h = train_weak(ds, WeightDistribution::uniform(3), WeakLearnerSpec{});
    std::vector<double> wrong_dim{1.0, 2.0};
    CHECK_THROWS_AS(h.predict_confidence(wrong_dim), std::invalid_argument);
}

}
