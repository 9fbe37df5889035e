#include "doctest.h"

#include <cmath>

#include "eusboost/errors.hpp"
#include "eusboost/evaluation.hpp"
#include "eusboost/metrics.hpp"
#include "support.hpp"

using namespace eusboost;
using testing::make_1d;

namespace {

Dataset separable(std::size_t n_pos, std::size_t n_neg) {
    std::vector<double> xs;
    std::vector<int> pos;
    for (std::size_t i = 0; i < n_pos; ++i) {
        xs.push_back(50.0 + static_cast<double>(i));
        pos.push_back(1);
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
        xs.push_back(static_cast<double>(i) * 0.5);
        pos.push_back(0);
    }
    return make_1d(xs, pos);
}

std::size_t count_in_fold(const Dataset& ds, const FoldPlan& plan, std::size_t r, std::size_t f,
                          ClassLabel y) {
    std::size_t c = 0;
    for (auto id : plan.test_ids(r, f)) c += ds.label(id) == y;
    return c;
}

MethodParams quick_params() {
    MethodParams p;
    p.rounds = 5;
    p.eus.max_evaluations = 300;
    return p;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("stratified folds with exact divisibility") {
    auto ds = separable(10, 10);
    RandomSource rng(1);
    auto plan = stratified_kfold(ds, 5, 1, rng);
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(count_in_fold(ds, plan, 0, f, ClassLabel::Positive) == 2);
        CHECK(count_in_fold(ds, plan, 0, f, ClassLabel::Negative) == 2);
    }
}

TEST_CASE("stratified folds with a remainder") {
    auto ds = separable(11, 30);
    RandomSource rng(2);
    auto plan = stratified_kfold(ds, 5, 2, rng);
    CHECK(plan.assignments[0] != plan.assignments[1]);
    for (std::size_t r = 0; r < 2; ++r) {
        std::vector<int> seen(ds.size(), 0);
        for (std::size_t f = 0; f < 5; ++f) {
            const auto p = count_in_fold(ds, plan, r, f, ClassLabel::Positive);
            CHECK((p == 2 || p == 3));
            CHECK(count_in_fold(ds, plan, r, f, ClassLabel::Negative) == 6);
            for (auto id : plan.test_ids(r, f)) ++seen[id];
            CHECK(plan.train_ids(r, f).size() + plan.test_ids(r, f).size() == ds.size());
        }
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("stratification needs k members per class") {
    auto ds = separable(3, 20);
    RandomSource rng(1);
    CHECK_THROWS_AS(stratified_kfold(ds, 5, 1, rng), DataError);
}

TEST_CASE("separable data scores perfectly in every fold") {
    auto ds = separable(10, 40);
    RandomSource rng(3);
    auto plan = stratified_kfold(ds, 5, 2, rng);
    for (Method m : {Method::EUB, Method::RUB, Method::UNB}) {
        auto res = cross_validate({m, quick_params()}, ds, plan, rng.substream("m"));
        REQUIRE(res.folds.size() == 10);
        for (const auto& f : res.folds) {
            CHECK(f.sen == 1.0);
            CHECK(f.gm == 1.0);
            CHECK(f.auc == 1.0);
        }
        CHECK(res.mean(Measure::GM) == 1.0);
    }
}

TEST_CASE("constant negative classifier") {
    // no feature varies, so every bagged tree is a single negative leaf
    std::vector<double> xs(40, 1.0);
    std::vector<int> pos(40, 0);
    for (int i = 0; i < 8; ++i) pos[i] = 1;
    auto ds = make_1d(xs, pos);
    RandomSource rng(4);
    auto plan = stratified_kfold(ds, 4, 1, rng);
    auto res = cross_validate({Method::BGG, quick_params()}, ds, plan, rng);
    for (const auto& f : res.folds) {
        CHECK(f.sen == 0.0);
        CHECK(f.gm == 0.0);
        CHECK(f.auc == 0.5);
    }
}

TEST_CASE("fold metrics agree with stored confusion matrices") {
    auto ds = testing::random_dataset(9, 15, 60, 2, 1.0);
    RandomSource rng(9);
    auto plan = stratified_kfold(ds, 5, 1, rng);
    auto res = cross_validate({Method::RUB, quick_params()}, ds, plan, rng);
    for (const auto& f : res.folds) {
        REQUIRE(f.cm.has_value());
        CHECK(f.cm->total() == plan.test_ids(f.repeat, f.fold).size());
        CHECK(*f.sen == sensitivity(*f.cm));
        CHECK(*f.gm == geometric_mean(*f.cm));
        CHECK(*f.auc == auc_single_point(*f.cm));
    }
}

TEST_CASE("parallel folds give the same results") {
    auto ds = testing::random_dataset(10, 12, 48, 2, 1.0);
    RandomSource rng(10);
    auto plan = stratified_kfold(ds, 4, 2, rng);
    auto a = cross_validate({Method::EUB, quick_params()}, ds, plan, rng, 1);
    auto b = cross_validate({Method::EUB, quick_params()}, ds, plan, rng, 3);
    CHECK(a.values(Measure::GM) == b.values(Measure::GM));
    CHECK(a.values(Measure::AUC) == b.values(Measure::AUC));
}

TEST_CASE("Wilcoxon examples") {
    std::vector<double> b{0.1, 0.5, 0.3, 0.9, 0.2};
    std::vector<double> a{0.11, 0.52, 0.33, 0.94, 0.25};
    CHECK(wilcoxon_signed_rank(a, b) == 0.0625);
    CHECK(wilcoxon_signed_rank(a, b, Sidedness::Greater) == 1.0 / 32.0);
    CHECK(wilcoxon_signed_rank(a, b, Sidedness::Less) == 1.0);

    std::vector<double> up{1, 2, 3, 4}, down{4, 3, 2, 1};
    CHECK(wilcoxon_signed_rank(up, down) == 1.0);

    CHECK_THROWS_AS(wilcoxon_signed_rank(a, a), DegenerateError);
    std::vector<double> short_b{1.0};
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, short_b), std::invalid_argument);
}

TEST_CASE("Wilcoxon exact path equals enumeration") {
    RandomSource rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid so ties and zeros happen
            a[i] = static_cast<double>(rng.below(9)) / 8.0;
            b[i] = static_cast<double>(rng.below(9)) / 8.0;
        }
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) any |= a[i] != b[i];
        if (!any) continue;
        CHECK(wilcoxon_signed_rank(a, b) == testing::oracle_wilcoxon(a, b, testing::Tail::Two));
        CHECK(wilcoxon_signed_rank(a, b, Sidedness::Greater) ==
              testing::oracle_wilcoxon(a, b, testing::Tail::Greater));
        CHECK(wilcoxon_signed_rank(a, b, Sidedness::Less) ==
              testing::oracle_wilcoxon(a, b, testing::Tail::Less));
    }
}

TEST_CASE("Wilcoxon normal approximation matches a reference implementation") {
    std::vector<double> a{0.81, 0.77, 0.9,  0.65, 0.72, 0.88, 0.93, 0.6,  0.7,  0.79, 0.84, 0.91, 0.66,
                          0.73, 0.8,  0.95, 0.69, 0.74, 0.86, 0.62, 0.78, 0.83, 0.71, 0.92, 0.67};
    std::vector<double> b{0.8, 0.7, 0.85, 0.7, 0.7, 0.8, 0.9, 0.55, 0.74, 0.7, 0.8, 0.9, 0.6,
                          0.75, 0.76, 0.9, 0.7, 0.7, 0.8, 0.6, 0.8, 0.8, 0.7, 0.85, 0.6};
    // scipy.stats.wilcoxon(a - b, correction=True, method="approx")
    CHECK(wilcoxon_signed_rank(a, b) == doctest::Approx(0.0015447115449723165).epsilon(1e-9));
    CHECK(wilcoxon_signed_rank(a, b, Sidedness::Greater) ==
          doctest::Approx(0.0007723557724861582).epsilon(1e-9));
    CHECK(wilcoxon_signed_rank(a, b, Sidedness::Less) == doctest::Approx(0.9992962189975187).epsilon(1e-9));
}

TEST_CASE("report row formats") {
    CHECK(format_overall_row(Method::EUB, 0.9219, 0.9252, 0.9388) == "EUB | 92.19 | 92.52 | 93.88");
    CHECK(format_overall_row(Method::BGG, std::nullopt, 0.5, 1.0) == "BGG | n/a | 50.00 | 100.00");
    CHECK(format_pair_cell(HypothesisResult{Method::BGG, Measure::SEN, 0.0031, true}) == "+ (0.0031)");
    CHECK(format_pair_cell(HypothesisResult{Method::BGG, Measure::SEN, 0.41, false}) == "- (0.4100)");
    CHECK(format_pair_cell(std::nullopt) == "n/a");
}

TEST_CASE("identical fold scores render as n/a") {
    auto ds = separable(10, 40);
    RandomSource rng(12);
    auto plan = stratified_kfold(ds, 5, 1, rng);
    std::vector<Method> methods{Method::UNB, Method::EUB};
    auto report = compare(methods, quick_params(), ds, plan, rng);
    REQUIRE(report.pairs.size() == 1);
    CHECK(report.pairs[0].other == Method::UNB);
    for (const auto& cell : report.pairs[0].cells) CHECK_FALSE(cell.has_value());
    CHECK(report.render_text().find("EUB vs. UNB | n/a | n/a | n/a") != std::string::npos);
}

TEST_CASE("compare argument checks") {
    auto ds = separable(10, 40);
    RandomSource rng(1);
    auto plan = stratified_kfold(ds, 5, 1, rng);
    std::vector<Method> one{Method::EUB}, dup{Method::EUB, Method::EUB};
    CHECK_THROWS_AS(compare(one, quick_params(), ds, plan, rng), std::invalid_argument);
    CHECK_THROWS_AS(compare(dup, quick_params(), ds, plan, rng), std::invalid_argument);
}

}
