#include "eusboost/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eusboost/errors.hpp"

namespace eusboost {

std::vector<std::size_t> FoldPlan::test_ids(std::size_t repeat, std::size_t fold) const {
    std::vector<std::size_t> ids;
    const auto& assign = assignments.at(repeat);
    for (std::size_t i = 0; i < assign.size(); ++i)
        if (assign[i] == fold) ids.push_back(i);
    return ids;
}

std::vector<std::size_t> FoldPlan::train_ids(std::size_t repeat, std::size_t fold) const {
    std::vector<std::size_t> ids;
    const auto& assign = assignments.at(repeat);
    for (std::size_t i = 0; i < assign.size(); ++i)
        if (assign[i] != fold) ids.push_back(i);
    return ids;
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::size_t repeats, RandomSource& rng) {
    if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
    if (repeats < 1) throw std::invalid_argument("at least one repeat is required");
    auto part = partition_by_class(ds);
    if (part.minority.size() < k || part.majority.size() < k)
        throw DataError("each class needs at least k=" + std::to_string(k) +
                        " instances for stratified folds (positive: " +
                        std::to_string(part.minority.size()) +
                        ", negative: " + std::to_string(part.majority.size()) + ")");
    FoldPlan plan{k, repeats, {}};
    for (std::size_t r = 0; r < repeats; ++r) {
        RandomSource rep = rng.substream("repeat-" + std::to_string(r));
        std::vector<std::size_t> assign(ds.size(), 0);
        // The negative deal continues where the positive one stopped, which
        // keeps total fold sizes within one of each other.
        std::size_t next = 0;
        for (auto* ids : {&part.minority, &part.majority}) {
            std::vector<std::size_t> shuffled = *ids;
            rep.shuffle(shuffled);
            for (std::size_t id : shuffled) {
                assign[id] = next;
                next = (next + 1) % k;
            }
        }
        plan.assignments.push_back(std::move(assign));
    }
    return plan;
}

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::SEN: return "SEN";
        case Measure::GM: return "GM";
        case Measure::AUC: return "AUC";
    }
    return "?";
}

std::optional<double> FoldOutcome::value(Measure m) const {
    switch (m) {
        case Measure::SEN: return sen;
        case Measure::GM: return gm;
        case Measure::AUC: return auc;
    }
    return std::nullopt;
}

std::vector<std::optional<double>> MethodResult::values(Measure m) const {
    std::vector<std::optional<double>> out;
    out.reserve(folds.size());
    for (const auto& f : folds) out.push_back(f.value(m));
    return out;
}

std::optional<double> MethodResult::mean(Measure m) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& f : folds) {
        if (auto v = f.value(m)) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::size_t MethodResult::missing(Measure m) const {
    return static_cast<std::size_t>(
        std::count_if(folds.begin(), folds.end(), [&](const auto& f) { return !f.value(m); }));
}

namespace {

struct FoldJob {
    std::size_t method_index;
    std::size_t repeat;
    std::size_t fold;
};

FoldOutcome run_fold(const MethodSpec& spec, const Dataset& ds, const FoldPlan& plan,
                     const RandomSource& rng, std::size_t repeat, std::size_t fold) {
    FoldOutcome out;
    out.repeat = repeat;
    out.fold = fold;
    const auto train_ids = plan.train_ids(repeat, fold);
    const auto test_ids = plan.test_ids(repeat, fold);
    const Dataset train = ds.subset(train_ids);
    const Dataset test = ds.subset(test_ids);
    RandomSource fold_rng = rng.substream(std::string(method_tag(spec.method)) + "/repeat-" +
                                          std::to_string(repeat) + "/fold-" + std::to_string(fold));
    std::optional<Model> model;
    try {
        model.emplace(train_method(spec.method, train, spec.params, fold_rng));
    } catch (const DegenerateError&) {
        return out;
    }
    const auto predicted = predict_labels(*model, test);
    const ConfusionMatrix cm = confusion_matrix(predicted, test.labels());
    out.cm = cm;
    const MetricBlock m = all_metrics(cm);
    out.sen = m.sensitivity;
    out.gm = m.geometric_mean;
    out.auc = m.auc;
    return out;
}

/// Runs every (method, repeat, fold) job; results land in fixed slots so the
/// thread count cannot affect them.
std::vector<MethodResult> run_all(std::span<const MethodSpec> specs, const Dataset& ds,
                                  const FoldPlan& plan, const RandomSource& rng, std::size_t jobs) {
    if (plan.assignments.size() != plan.repeats)
        throw std::invalid_argument("fold plan is inconsistent");
    for (const auto& a : plan.assignments)
        if (a.size() != ds.size()) throw std::invalid_argument("fold plan was built for another dataset");

    std::vector<FoldJob> work;
    for (std::size_t m = 0; m < specs.size(); ++m)
        for (std::size_t r = 0; r < plan.repeats; ++r)
            for (std::size_t f = 0; f < plan.k; ++f) work.push_back({m, r, f});

    std::vector<FoldOutcome> outcomes(work.size());
    std::vector<std::exception_ptr> errors(work.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t j = cursor++; j < work.size(); j = cursor++) {
            try {
                const auto& w = work[j];
                outcomes[j] = run_fold(specs[w.method_index], ds, plan, rng, w.repeat, w.fold);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, work.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<MethodResult> results;
    for (const auto& s : specs) results.push_back({s.method, {}});
    for (std::size_t j = 0; j < work.size(); ++j)
        results[work[j].method_index].folds.push_back(std::move(outcomes[j]));
    for (const auto& r : results) {
        const bool any = std::any_of(r.folds.begin(), r.folds.end(),
                                     [](const auto& f) { return f.sen || f.gm || f.auc; });
        if (!any)
            throw DegenerateError("every fold of " + std::string(method_tag(r.method)) +
                                  " produced undefined metrics");
    }
    return results;
}

}  // namespace

MethodResult cross_validate(const MethodSpec& spec, const Dataset& ds, const FoldPlan& plan,
                            const RandomSource& rng, std::size_t jobs) {
    return run_all({&spec, 1}, ds, plan, rng, jobs).front();
}

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, Sidedness sided) {
    if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
    if (a.empty()) throw std::invalid_argument("paired samples are empty");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw DegenerateError("all paired differences are zero");
    const std::size_t n = diffs.size();

    // Ranks are doubled so tied averages stay integral.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    std::vector<std::uint64_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const std::uint64_t avg2 = (i + 1) + (j + 1);
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = avg2;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    std::uint64_t total2 = 0;
    std::uint64_t observed2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (diffs[i] > 0.0) observed2 += rank2[i];
    }

    if (n <= kWilcoxonExactLimit) {
        // counts[s]: sign patterns whose doubled positive-rank sum is s.
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = total2; s + 1 > rank2[i]; --s) counts[s] += counts[s - rank2[i]];
        }
        const auto centred = [&](std::uint64_t s) {
            const std::int64_t v = 2 * static_cast<std::int64_t>(s) - static_cast<std::int64_t>(total2);
            return v < 0 ? -v : v;
        };
        std::uint64_t hits = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            bool extreme = false;
            switch (sided) {
                case Sidedness::TwoSided: extreme = centred(s) >= centred(observed2); break;
                case Sidedness::Greater: extreme = s >= observed2; break;
                case Sidedness::Less: extreme = s <= observed2; break;
            }
            if (extreme) hits += counts[s];
        }
        return static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
    }

    const double nn = static_cast<double>(n);
    const double w = static_cast<double>(observed2) / 2.0;
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double sd = std::sqrt(var);
    double p = 1.0;
    switch (sided) {
        case Sidedness::TwoSided: {
            const double z = std::max(0.0, std::abs(w - mean) - 0.5) / sd;
            p = std::erfc(z / std::sqrt(2.0));
            break;
        }
        case Sidedness::Greater: {
            const double z = (w - mean - 0.5) / sd;
            p = 0.5 * std::erfc(z / std::sqrt(2.0));
            break;
        }
        case Sidedness::Less: {
            const double z = (w - mean + 0.5) / sd;
            p = 0.5 * std::erfc(-z / std::sqrt(2.0));
            break;
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

ComparisonReport compare(std::span<const Method> methods, const MethodParams& params,
                         const Dataset& ds, const FoldPlan& plan, const RandomSource& rng,
                         std::size_t jobs, Sidedness sided) {
    if (methods.size() < 2) throw std::invalid_argument("compare needs at least two methods");
    std::vector<MethodSpec> specs;
    for (Method m : methods) {
        if (std::any_of(specs.begin(), specs.end(), [&](const auto& s) { return s.method == m; }))
            throw std::invalid_argument("method " + std::string(method_tag(m)) + " listed twice");
        specs.push_back({m, params});
    }

    ComparisonReport report;
    report.results = run_all(specs, ds, plan, rng, jobs);
    report.k = plan.k;
    report.repeats = plan.repeats;
    report.sided = sided;
    report.learner = params.learner;

    auto eub = std::find_if(report.results.begin(), report.results.end(),
                            [](const auto& r) { return r.method == Method::EUB; });
    if (eub == report.results.end()) return report;

    for (const auto& other : report.results) {
        if (other.method == Method::EUB) continue;
        ComparisonReport::PairRow row{other.method, {}};
        for (std::size_t mi = 0; mi < 3; ++mi) {
            const Measure measure = kReportedMeasures[mi];
            const auto ev = eub->values(measure);
            const auto ov = other.values(measure);
            std::vector<double> a;
            std::vector<double> b;
            for (std::size_t f = 0; f < ev.size(); ++f) {
                if (ev[f] && ov[f]) {
                    a.push_back(*ev[f]);
                    b.push_back(*ov[f]);
                }
            }
            const auto em = eub->mean(measure);
            const auto om = other.mean(measure);
            if (a.empty() || !em || !om) continue;
            try {
                const double p = wilcoxon_signed_rank(a, b, sided);
                row.cells[mi] = HypothesisResult{other.method, measure, p, *em >= *om};
            } catch (const DegenerateError&) {
                // identical fold scores: rendered as n/a
            }
        }
        report.pairs.push_back(row);
    }
    return report;
}

namespace {

std::string percent(std::optional<double> v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
    return buf;
}

std::string learner_description(const WeakLearnerSpec& spec) {
    if (spec.kind == LearnerKind::Stump) return "stump";
    return "tree(max_depth=" + std::to_string(spec.max_depth) + ")";
}

std::string_view sided_name(Sidedness s) {
    switch (s) {
        case Sidedness::TwoSided: return "two-sided";
        case Sidedness::Greater: return "one-sided, EUB greater";
        case Sidedness::Less: return "one-sided, EUB less";
    }
    return "?";
}

}  // namespace

std::string format_overall_row(Method m, std::optional<double> sen, std::optional<double> gm,
                               std::optional<double> auc) {
    return std::string(method_tag(m)) + " | " + percent(sen) + " | " + percent(gm) + " | " +
           percent(auc);
}

std::string format_pair_cell(const std::optional<HypothesisResult>& cell) {
    if (!cell) return "n/a";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%c (%.4f)", cell->eub_at_least_as_good ? '+' : '-',
                  cell->p_value);
    return buf;
}

std::string ComparisonReport::render_text() const {
    std::ostringstream out;
    out << "# Overall comparison: mean over stratified " << k << "-fold x " << repeats
        << " CV, percentages\n";
    out << "# AUC is the single-point (1 + TPR - FPR) / 2; base learner: "
        << learner_description(learner) << "\n";
    out << "Method | SEN | GM | AUC\n";
    for (const auto& r : results) {
        out << format_overall_row(r.method, r.mean(Measure::SEN), r.mean(Measure::GM),
                                  r.mean(Measure::AUC))
            << "\n";
    }
    std::size_t missing = 0;
    for (const auto& r : results)
        for (Measure m : kReportedMeasures) missing += r.missing(m);
    if (missing > 0)
        out << "# warning: " << missing << " undefined fold values excluded from means\n";

    if (!pairs.empty()) {
        out << "\n# Pairwise Wilcoxon signed-rank tests over paired folds (" << sided_name(sided)
            << "); + means EUB mean >= other mean\n";
        out << "Hypothesis | p-value (SEN) | p-value (GM) | p-value (AUC)\n";
        for (const auto& row : pairs) {
            out << "EUB vs. " << method_tag(row.other);
            for (const auto& cell : row.cells) out << " | " << format_pair_cell(cell);
            out << "\n";
        }
    }
    return out.str();
}

std::string ComparisonReport::render_csv() const {
    std::ostringstream out;
    out << "table,subject,measure,value,direction\n";
    for (const auto& r : results) {
        for (Measure m : kReportedMeasures)
            out << "overall," << method_tag(r.method) << "," << measure_name(m) << ","
                << percent(r.mean(m)) << ",\n";
    }
    for (const auto& row : pairs) {
        for (std::size_t mi = 0; mi < 3; ++mi) {
            out << "pairwise,EUB vs. " << method_tag(row.other) << ","
                << measure_name(kReportedMeasures[mi]) << ",";
            const auto& cell = row.cells[mi];
            if (cell) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", cell->p_value);
                out << buf << "," << (cell->eub_at_least_as_good ? "+" : "-") << "\n";
            } else {
                out << "n/a,\n";
            }
        }
    }
    return out.str();
}

}  // namespace eusboost
