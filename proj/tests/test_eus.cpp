#include "doctest.h"

#include <cmath>

#include "eusboost/errors.hpp"
#include "eusboost/eus.hpp"
#include "support.hpp"

using namespace eusboost;
using testing::make_1d;

namespace {

// n_maj = 12, n_min = 5 with overlapping classes so the optimum is not trivial.
Dataset toy12(std::uint64_t seed) { return testing::random_dataset(seed, 5, 12, 2, 1.2); }

}  // namespace

TEST_SUITE("eus") {

TEST_CASE("well separated clusters give LOO GM 1") {
    auto ds = make_1d({0, 0.1, 0.2, 10, 10.1, 10.2, 10.3}, {1, 1, 1, 0, 0, 0, 0});
    CHECK(loo_1nn_gm(ds, Chromosome::all_ones(4)) == 1.0);
}

TEST_CASE("hand-simulated LOO on a 1-D line") {
    // minority at 0, 0.5, 4, 6, 9; majority at 2, 3, 7, 10
    auto ds = make_1d({0, 0.5, 2, 3, 4, 6, 7, 9, 10}, {1, 1, 0, 0, 1, 1, 0, 1, 0});
    // tp 2, fn 3, tn 2, fp 2 (x=3 ties between 2 and 4 and takes the lower id)
    const double expected = 0.4472135954999579;
    CHECK(std::abs(loo_1nn_gm(ds, Chromosome::all_ones(4)) - expected) < 1e-15);
    CHECK(std::abs(testing::oracle_loo_gm(ds, {1, 1, 1, 1}) - expected) < 1e-15);
}

TEST_CASE("zero-distance ties resolve to the lower id") {
    auto ds = make_1d({0, 0, 10, 10}, {0, 1, 0, 1});
    // each point's twin has the other label, so nothing is right
    CHECK(loo_1nn_gm(ds, Chromosome::all_ones(2)) == 0.0);
    CHECK(loo_1nn_gm(ds, Chromosome::all_ones(2)) == testing::oracle_loo_gm(ds, {1, 1}));
}

TEST_CASE("LOO matches the brute-force scan") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto ds = testing::random_dataset(seed, 6, 14, 3, 0.7);
        RandomSource rng(seed);
        for (int k = 0; k < 20; ++k) {
            std::vector<std::uint8_t> mask(14);
            for (auto& b : mask) b = rng.bernoulli(0.5);
            mask[rng.below(14)] = 1;
            const double want = testing::oracle_loo_gm(ds, mask);
            if (std::isnan(want)) {
                CHECK_THROWS_AS(loo_1nn_gm(ds, Chromosome(mask)), UndefinedMetricError);
            } else {
                CHECK(loo_1nn_gm(ds, Chromosome(mask)) == want);
            }
        }
    }
}

TEST_CASE("fitness equals GM at perfect balance and ignores lambda without priors") {
    auto ds = toy12(3);
    EusContext ctx(ds);
    auto half = Chromosome::from_code(0b11111, 12);
    EusConfig cfg;
    const double gm = loo_1nn_gm(ds, half);
    CHECK(fitness(half, cfg, ctx) == gm);
    cfg.diversity_weight = 0.9;
    CHECK(fitness(half, cfg, ctx) == gm);
}

TEST_CASE("mask equal to a prior loses the diversity share") {
    auto ds = toy12(4);
    EusContext ctx(ds);
    auto mask = Chromosome::from_code(0b101010101, 12);
    EusConfig cfg;
    const double base = fitness(mask, cfg, ctx);
    ctx.add_prior_mask(mask);
    CHECK(fitness(mask, cfg, ctx) == doctest::Approx(0.75 * base).epsilon(1e-15));
}

TEST_CASE("fitness matches an independent evaluation for every mask") {
    auto ds = toy12(7);
    EusContext ctx(ds);
    EusConfig cfg;
    for (std::uint64_t code = 1; code < (1u << 12); ++code) {
        auto c = Chromosome::from_code(code, 12);
        CHECK(std::abs(fitness(c, cfg, ctx) - testing::oracle_fitness(ds, c.bits(), 0.2, 0.25, {})) < 1e-12);
    }
    auto prior_a = Chromosome::from_code(0b000011110000, 12);
    auto prior_b = Chromosome::from_code(0b111000000111, 12);
    ctx.add_prior_mask(prior_a);
    ctx.add_prior_mask(prior_b);
    for (std::uint64_t code = 1; code < (1u << 12); code += 7) {
        auto c = Chromosome::from_code(code, 12);
        CHECK(std::abs(fitness(c, cfg, ctx) -
                       testing::oracle_fitness(ds, c.bits(), 0.2, 0.25, {prior_a.bits(), prior_b.bits()})) < 1e-12);
    }
}

TEST_CASE("ranking prefers fitness, then fewer bits, then smaller mask") {
    auto a = Chromosome::from_code(0b001, 3);
    auto b = Chromosome::from_code(0b011, 3);
    CHECK(ranks_above(0.6, b, 0.5, a));
    CHECK(ranks_above(0.5, a, 0.5, b));
    CHECK_FALSE(ranks_above(0.5, b, 0.5, a));
    auto c = Chromosome::from_code(0b010, 3);
    // bits {0,1,0} < {1,0,0}
    CHECK(ranks_above(0.5, c, 0.5, a));
    CHECK_FALSE(ranks_above(0.5, a, 0.5, a));
}

TEST_CASE("exhaustive search breaks an exact tie lexicographically") {
    // one minority point between two mirror-image majority points
    auto ds = make_1d({-5, 0, 5}, {0, 1, 0});
    EusContext ctx(ds);
    auto [best, fit] = exhaustive_best(EusConfig{}, ctx);
    CHECK(fit == 0.0);
    CHECK(best.bits() == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("single majority instance is always kept") {
    auto ds = make_1d({0, 1, 2, 5}, {1, 1, 1, 0});
    EusContext ctx(ds);
    RandomSource rng(1);
    auto r = evolve(EusConfig{}, ctx, rng);
    CHECK(r.best.bits() == std::vector<std::uint8_t>{1});
}

TEST_CASE("evolve is deterministic and elitist") {
    auto ds = toy12(5);
    EusContext ctx(ds);
    EusConfig cfg;
    cfg.max_evaluations = 1000;
    RandomSource a(17), b(17);
    auto ra = evolve(cfg, ctx, a);
    auto rb = evolve(cfg, ctx, b);
    CHECK(ra.best == rb.best);
    CHECK(ra.fitness == rb.fitness);
    CHECK(ra.fitness >= ra.best_initial_fitness);
    CHECK(ra.evaluations <= cfg.max_evaluations);
    CHECK(ra.best.valid());
    CHECK(ra.fitness == fitness(ra.best, cfg, ctx));
}

TEST_CASE("evolve finds an all-ones optimum") {
    // balanced, separable: keeping everyone scores GM 1 with no penalty
    std::vector<double> xs;
    std::vector<int> pos;
    for (int i = 0; i < 6; ++i) {
        xs.push_back(i * 0.1);
        pos.push_back(1);
        xs.push_back(20 + i * 0.1);
        pos.push_back(0);
    }
    auto ds = make_1d(xs, pos);
    EusContext ctx(ds);
    auto [opt, opt_fit] = exhaustive_best(EusConfig{}, ctx);
    REQUIRE(opt == Chromosome::all_ones(6));
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomSource rng(seed);
        hits += evolve(EusConfig{}, ctx, rng).best == opt;
    }
    CHECK(hits >= 8);
}

TEST_CASE("materialized subset") {
    auto ds = toy12(9);
    auto full = materialize_subset(ds, Chromosome::all_ones(12));
    CHECK(full.data == ds);
    CHECK(full.source_ids.size() == ds.size());
    auto one = materialize_subset(ds, Chromosome::from_code(0b100, 12));
    CHECK(one.data.size() == 6);
    auto part = partition_by_class(ds);
    CHECK(std::is_sorted(one.source_ids.begin(), one.source_ids.end()));
    CHECK(std::count(one.source_ids.begin(), one.source_ids.end(), part.majority[2]) == 1);
    for (std::size_t k = 0; k < one.data.size(); ++k)
        CHECK(one.data.label(k) == ds.label(one.source_ids[k]));
    CHECK_THROWS_AS(materialize_subset(ds, Chromosome(std::vector<std::uint8_t>(12, 0))), std::invalid_argument);
}

TEST_CASE("config validation") {
    EusConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.population = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = EusConfig{};
    cfg.max_evaluations = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = EusConfig{};
    CHECK(cfg.mutation_rate_for(20) == doctest::Approx(0.05));
}

}
