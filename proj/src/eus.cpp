#include "eusboost/eus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "eusboost/errors.hpp"
#include "eusboost/metrics.hpp"

namespace eusboost {

namespace {

// Above this size the n*(n-1) neighbour table is not worth its memory.
constexpr std::size_t kMaxCachedNeighbours = 3000;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

struct Individual {
    Chromosome chrom;
    double fitness = 0.0;
};

bool better(const Individual& a, const Individual& b) {
    return ranks_above(a.fitness, a.chrom, b.fitness, b.chrom);
}

}  // namespace

Chromosome::Chromosome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
}

Chromosome Chromosome::all_ones(std::size_t n) {
    return Chromosome(std::vector<std::uint8_t>(n, 1));
}

Chromosome Chromosome::from_code(std::uint64_t code, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t j = 0; j < n; ++j) bits[j] = static_cast<std::uint8_t>((code >> j) & 1U);
    return Chromosome(std::move(bits));
}

std::size_t Chromosome::selected() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double Chromosome::normalized_hamming(const Chromosome& other) const {
    if (other.size() != size()) throw std::invalid_argument("mask lengths differ");
    if (bits_.empty()) return 0.0;
    std::size_t diff = 0;
    for (std::size_t j = 0; j < bits_.size(); ++j) diff += bits_[j] != other.bits_[j];
    return static_cast<double>(diff) / static_cast<double>(bits_.size());
}

void EusConfig::validate() const {
    if (population < 2) throw std::invalid_argument("EUS population must be at least 2");
    auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!in_unit(crossover_rate)) throw std::invalid_argument("crossover rate must be in [0, 1]");
    if (mutation_rate && !in_unit(*mutation_rate))
        throw std::invalid_argument("mutation rate must be in [0, 1]");
    if (!in_unit(diversity_weight)) throw std::invalid_argument("diversity weight must be in [0, 1]");
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
        throw std::invalid_argument("penalty must be finite and non-negative");
    if (max_evaluations < population)
        throw std::invalid_argument("max evaluations must be at least the population size");
    if (elitism >= population) throw std::invalid_argument("elitism must be below the population size");
}

double EusConfig::mutation_rate_for(std::size_t n_maj) const {
    if (mutation_rate) return *mutation_rate;
    return n_maj == 0 ? 0.0 : 1.0 / static_cast<double>(n_maj);
}

EusContext::EusContext(const Dataset& ds) : ds_(ds), partition_(partition_by_class(ds)) {
    const std::size_t n = ds.size();
    if (n > kMaxCachedNeighbours || n < 2) return;
    neighbour_order_.resize(n * (n - 1));
    std::vector<double> dist(n);
    std::vector<std::uint32_t> order;
    order.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist[j] = squared_distance(ds.row(i), ds.row(j));
            order.push_back(static_cast<std::uint32_t>(j));
        }
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        });
        std::copy(order.begin(), order.end(), neighbour_order_.begin() + static_cast<std::ptrdiff_t>(i * (n - 1)));
    }
}

void EusContext::add_prior_mask(Chromosome mask) {
    if (mask.size() != n_maj())
        throw std::invalid_argument("prior mask length " + std::to_string(mask.size()) +
                                    " does not match majority size " + std::to_string(n_maj()));
    prior_.push_back(std::move(mask));
}

std::size_t EusContext::nearest_candidate(std::size_t i,
                                          const std::vector<std::uint8_t>& is_candidate) const {
    const std::size_t n = ds_.size();
    if (!neighbour_order_.empty()) {
        const auto* row = neighbour_order_.data() + i * (n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (is_candidate[row[k]]) return row[k];
        }
        return n;
    }
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !is_candidate[j]) continue;
        const double d = squared_distance(ds_.row(i), ds_.row(j));
        if (d < best_dist) {
            best_dist = d;
            best = j;
        }
    }
    return best;
}

double EusContext::loo_1nn_gm(const Chromosome& chrom) const {
    if (chrom.size() != n_maj())
        throw std::invalid_argument("mask length does not match majority size");
    if (!chrom.valid()) throw std::invalid_argument("mask selects no majority instance");
    std::vector<std::uint8_t> is_candidate(ds_.size(), 0);
    std::size_t candidates = 0;
    for (std::size_t id : partition_.minority) {
        is_candidate[id] = 1;
        ++candidates;
    }
    for (std::size_t j = 0; j < n_maj(); ++j) {
        if (chrom.test(j)) {
            is_candidate[partition_.majority[j]] = 1;
            ++candidates;
        }
    }
    if (candidates < 2) throw std::invalid_argument("LOO candidate set needs at least 2 instances");

    ConfusionMatrix cm;
    for (std::size_t i = 0; i < ds_.size(); ++i) {
        if (!is_candidate[i]) continue;
        const std::size_t nn = nearest_candidate(i, is_candidate);
        const bool pred_pos = ds_.label(nn) == ClassLabel::Positive;
        if (ds_.label(i) == ClassLabel::Positive)
            ++(pred_pos ? cm.tp : cm.fn);
        else
            ++(pred_pos ? cm.fp : cm.tn);
    }
    return geometric_mean(cm);
}

double loo_1nn_gm(const Dataset& ds, const Chromosome& chrom) {
    return EusContext(ds).loo_1nn_gm(chrom);
}

double fitness(const Chromosome& chrom, const EusConfig& cfg, const EusContext& ctx) {
    double base = 0.0;
    try {
        const double gm = ctx.loo_1nn_gm(chrom);
        const double balance = static_cast<double>(chrom.selected()) / static_cast<double>(ctx.n_min());
        base = gm - cfg.penalty * std::abs(1.0 - balance);
    } catch (const UndefinedMetricError&) {
        base = 0.0;
    }
    if (ctx.prior_masks().empty()) return base;
    double diversity = std::numeric_limits<double>::infinity();
    for (const auto& prior : ctx.prior_masks())
        diversity = std::min(diversity, chrom.normalized_hamming(prior));
    return (1.0 - cfg.diversity_weight) * base + cfg.diversity_weight * diversity;
}

bool ranks_above(double fit_a, const Chromosome& a, double fit_b, const Chromosome& b) {
    if (fit_a != fit_b) return fit_a > fit_b;
    const auto sa = a.selected();
    const auto sb = b.selected();
    if (sa != sb) return sa < sb;
    return a < b;
}

EusResult evolve(const EusConfig& cfg, const EusContext& ctx, RandomSource& rng) {
    cfg.validate();
    const std::size_t n_maj = ctx.n_maj();
    if (ctx.n_min() == 0 || n_maj == 0) throw DegenerateError("EUS needs both classes present");

    EusResult result;
    if (n_maj == 1) {
        result.best = Chromosome::all_ones(1);
        result.fitness = fitness(result.best, cfg, ctx);
        result.best_initial_fitness = result.fitness;
        result.evaluations = 1;
        return result;
    }

    const double init_p =
        std::min(1.0, static_cast<double>(ctx.n_min()) / static_cast<double>(n_maj));
    const double mutation = cfg.mutation_rate_for(n_maj);

    auto repair = [&](Chromosome& c) {
        if (!c.valid()) c.set(rng.below(n_maj), true);
    };
    Individual best;
    bool have_best = false;
    auto evaluate = [&](Chromosome c) {
        Individual ind{std::move(c), 0.0};
        ind.fitness = fitness(ind.chrom, cfg, ctx);
        ++result.evaluations;
        if (!have_best || better(ind, best)) {
            best = ind;
            have_best = true;
        }
        return ind;
    };

    std::vector<Individual> population;
    population.reserve(cfg.population);
    population.push_back(evaluate(Chromosome::all_ones(n_maj)));
    while (population.size() < cfg.population) {
        std::vector<std::uint8_t> bits(n_maj);
        for (auto& b : bits) b = rng.bernoulli(init_p) ? 1 : 0;
        Chromosome c(std::move(bits));
        repair(c);
        population.push_back(evaluate(std::move(c)));
    }
    result.best_initial_fitness = best.fitness;

    auto tournament = [&]() -> const Individual& {
        const auto& a = population[rng.below(population.size())];
        const auto& b = population[rng.below(population.size())];
        return better(a, b) ? a : b;
    };

    while (result.evaluations < cfg.max_evaluations) {
        std::sort(population.begin(), population.end(), better);
        std::vector<Individual> next(population.begin(),
                                     population.begin() + static_cast<std::ptrdiff_t>(cfg.elitism));
        while (next.size() < cfg.population && result.evaluations < cfg.max_evaluations) {
            Chromosome child_a = tournament().chrom;
            Chromosome child_b = tournament().chrom;
            if (rng.bernoulli(cfg.crossover_rate)) {
                for (std::size_t j = 0; j < n_maj; ++j) {
                    if (rng.next_u64() >> 63) {
                        const bool a = child_a.test(j);
                        child_a.set(j, child_b.test(j));
                        child_b.set(j, a);
                    }
                }
            }
            for (Chromosome* child : {&child_a, &child_b}) {
                for (std::size_t j = 0; j < n_maj; ++j) {
                    if (rng.bernoulli(mutation)) child->flip(j);
                }
                repair(*child);
            }
            next.push_back(evaluate(std::move(child_a)));
            if (next.size() < cfg.population && result.evaluations < cfg.max_evaluations)
                next.push_back(evaluate(std::move(child_b)));
        }
        population = std::move(next);
    }

    result.best = best.chrom;
    result.fitness = best.fitness;
    return result;
}

std::pair<Chromosome, double> exhaustive_best(const EusConfig& cfg, const EusContext& ctx) {
    const std::size_t n_maj = ctx.n_maj();
    if (n_maj == 0) throw DegenerateError("no majority instances to select");
    if (n_maj > 16) throw std::invalid_argument("exhaustive search supports at most 16 majority instances");
    Individual best;
    bool have_best = false;
    const std::uint64_t end = std::uint64_t{1} << n_maj;
    for (std::uint64_t code = 1; code < end; ++code) {
        Individual ind{Chromosome::from_code(code, n_maj), 0.0};
        ind.fitness = fitness(ind.chrom, cfg, ctx);
        if (!have_best || better(ind, best)) {
            best = std::move(ind);
            have_best = true;
        }
    }
    return {best.chrom, best.fitness};
}

Subset materialize_subset(const Dataset& ds, const Chromosome& chrom) {
    const auto part = partition_by_class(ds);
    if (chrom.size() != part.majority.size())
        throw std::invalid_argument("mask length does not match majority size");
    if (!chrom.valid()) throw std::invalid_argument("mask selects no majority instance");
    std::vector<std::size_t> ids = part.minority;
    for (std::size_t j = 0; j < part.majority.size(); ++j) {
        if (chrom.test(j)) ids.push_back(part.majority[j]);
    }
    std::sort(ids.begin(), ids.end());
    Dataset data = ds.subset(ids);
    return {std::move(data), std::move(ids)};
}

}  // namespace eusboost
