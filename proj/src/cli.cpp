#include "eusboost/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eusboost/errors.hpp"
#include "eusboost/evaluation.hpp"
#include "eusboost/io.hpp"
#include "eusboost/metrics.hpp"

namespace eusboost {

namespace {

const std::vector<std::string> kMethodChoices = {"bgg", "bst", "unb", "rbb", "ovb", "rub", "eub"};

/// Learner and EUS flags shared by train, compare and eus-select.
struct HyperFlags {
    std::string learner = "tree";
    int max_depth = 3;
    double smoothing = 1.0;
    std::size_t population = 50;
    std::size_t max_evals = 5000;
    double penalty = 0.2;
    double diversity = 0.25;
    std::size_t rounds = 10;

    void attach(CLI::App* cmd, bool with_learner) {
        if (with_learner) {
            cmd->add_option("--rounds", rounds, "Boosting rounds T, or bag size for bagging")
                ->capture_default_str()
                ->check(CLI::PositiveNumber);
            cmd->add_option("--learner", learner, "Weak learner")
                ->capture_default_str()
                ->check(CLI::IsMember({"tree", "stump"}));
            cmd->add_option("--max-depth", max_depth, "Tree depth limit")
                ->capture_default_str()
                ->check(CLI::Range(1, 10));
            cmd->add_option("--smoothing", smoothing, "Laplace constant for leaf confidences")
                ->capture_default_str()
                ->check(CLI::NonNegativeNumber);
        }
        cmd->add_option("--population", population, "EUS population size")->capture_default_str();
        cmd->add_option("--max-evals", max_evals, "EUS fitness evaluation budget")->capture_default_str();
        cmd->add_option("--penalty", penalty, "EUS balance penalty P")->capture_default_str();
        cmd->add_option("--diversity", diversity, "EUS diversity weight")->capture_default_str();
    }

    MethodParams params() const {
        MethodParams p;
        p.rounds = rounds;
        p.learner.kind = learner == "stump" ? LearnerKind::Stump : LearnerKind::Tree;
        p.learner.max_depth = max_depth;
        p.learner.smoothing = smoothing;
        p.eus.population = population;
        p.eus.max_evaluations = max_evals;
        p.eus.penalty = penalty;
        p.eus.diversity_weight = diversity;
        return p;
    }
};

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string number_or_undefined(const std::optional<double>& v) {
    return v ? number(*v) : std::string("undefined");
}

void check_dim(const std::vector<std::vector<double>>& rows, std::size_t dim) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dim)
            throw DataError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                " features, model expects " + std::to_string(dim),
                            r);
    }
}

int cmd_gen(const SyntheticSpec& spec, const std::string& out_path, std::ostream& out) {
    const Dataset ds = generate_synthetic(spec);
    if (out_path.empty() || out_path == "-") {
        write_csv(out, ds);
        return kExitOk;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw DataError("cannot write " + out_path);
    write_csv(file, ds);
    return kExitOk;
}

int cmd_train(Method method, const std::string& data, const std::string& label_col,
              const HyperFlags& flags, std::uint64_t seed, const std::string& out_path,
              std::ostream& out) {
    const Dataset ds = load_csv(data, label_col);
    ModelFile file;
    file.method = method;
    file.params = flags.params();
    RandomSource rng(seed, "train");
    file.model = train_method(method, ds, file.params, rng);
    file.dataset_fingerprint = fingerprint(ds);
    file.seed = seed;
    file.labels = ds.label_names();
    file.dim = ds.dim();
    save_model(file, out_path);

    out << "trained " << method_tag(method) << " on " << ds.size() << " rows (positive '"
        << ds.label_names().positive << "', IR " << number(imbalance_ratio(ds)) << ")\n";
    if (const auto* boosted = std::get_if<BoostedEnsemble>(&file.model)) {
        out << "round,epsilon,beta,subset_size,retries\n";
        for (std::size_t t = 0; t < boosted->telemetry.size(); ++t) {
            const auto& tel = boosted->telemetry[t];
            out << t + 1 << "," << number(tel.epsilon) << "," << number(tel.beta) << ","
                << tel.subset_size << "," << tel.retries << "\n";
        }
    } else {
        out << "members: " << std::get<BaggedEnsemble>(file.model).members.size() << "\n";
    }
    out << "model written to " << out_path << "\n";
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& data, const std::string& label_col,
                std::ostream& out) {
    const ModelFile file = load_model(model_path);
    const RawTable table = load_raw_csv(data, label_col);
    check_dim(table.rows, file.dim);
    out << "row_index,predicted_label,score\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const Prediction p = predict(file.model, table.rows[r]);
        out << r << "," << file.labels.name_of(p.label) << "," << number(p.score) << "\n";
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& data,
                 const std::string& label_col, std::ostream& out) {
    const ModelFile file = load_model(model_path);
    const RawTable table = load_raw_csv(data, label_col);
    if (table.labels.empty()) throw DataError(data + ": no column named '" + label_col + "'");
    if (table.rows.empty()) throw DataError(data + ": no data rows");
    check_dim(table.rows, file.dim);

    std::vector<ClassLabel> actual;
    std::vector<ClassLabel> predicted;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& raw = table.labels[r];
        if (raw == file.labels.positive)
            actual.push_back(ClassLabel::Positive);
        else if (raw == file.labels.negative)
            actual.push_back(ClassLabel::Negative);
        else
            throw DataError("row " + std::to_string(r) + ": label '" + raw +
                                "' is not one of the model's classes",
                            r, label_col);
        predicted.push_back(predict(file.model, table.rows[r]).label);
    }
    const MetricBlock m = all_metrics(confusion_matrix(predicted, actual));
    out << "# " << table.rows.size() << " rows, positive class '" << file.labels.positive
        << "'; AUC is single-point (1 + TPR - FPR) / 2\n";
    out << "tp: " << m.cm.tp << "\n";
    out << "fn: " << m.cm.fn << "\n";
    out << "fp: " << m.cm.fp << "\n";
    out << "tn: " << m.cm.tn << "\n";
    out << "accuracy: " << number_or_undefined(m.accuracy) << "\n";
    out << "sensitivity: " << number_or_undefined(m.sensitivity) << "\n";
    out << "specificity: " << number_or_undefined(m.specificity) << "\n";
    out << "precision: " << number_or_undefined(m.precision) << "\n";
    out << "gm: " << number_or_undefined(m.geometric_mean) << "\n";
    out << "auc: " << number_or_undefined(m.auc) << "\n";
    out << "f_measure: " << number_or_undefined(m.f_measure) << "\n";
    return kExitOk;
}

int cmd_eus_select(const std::string& data, const std::string& label_col, const HyperFlags& flags,
                   std::uint64_t seed, std::ostream& out) {
    const Dataset ds = load_csv(data, label_col);
    const EusConfig cfg = flags.params().eus;
    const EusContext ctx(ds);
    RandomSource rng(seed, "eus-select");
    const EusResult result = evolve(cfg, ctx, rng);

    out << "# evolutionary undersampling: " << ctx.n_min() << " minority, " << ctx.n_maj()
        << " majority, " << result.evaluations << " evaluations\n";
    out << "fitness: " << number(result.fitness) << "\n";
    out << "loo_1nn_gm: " << number(ctx.loo_1nn_gm(result.best)) << "\n";
    out << "selected: " << result.best.selected() << "\n";
    out << "selected_ids:";
    bool first = true;
    for (std::size_t j = 0; j < result.best.size(); ++j) {
        if (!result.best.test(j)) continue;
        out << (first ? " " : ",") << ctx.partition().majority[j];
        first = false;
    }
    out << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& data, const std::string& label_col, const std::string& methods_arg,
                std::size_t folds, std::size_t repeats, std::uint64_t seed, const HyperFlags& flags,
                const std::string& format, std::size_t jobs, const std::string& sided_arg,
                std::ostream& out) {
    std::vector<Method> methods;
    std::stringstream ss(methods_arg);
    std::string tag;
    while (std::getline(ss, tag, ',')) {
        const auto m = parse_method(tag);
        if (!m) throw std::invalid_argument("unknown method '" + tag + "'");
        methods.push_back(*m);
    }
    const Sidedness sided = sided_arg == "greater" ? Sidedness::Greater
                            : sided_arg == "less"  ? Sidedness::Less
                                                   : Sidedness::TwoSided;
    const Dataset ds = load_csv(data, label_col);
    RandomSource rng(seed, "compare");
    RandomSource plan_rng = rng.substream("folds");
    const FoldPlan plan = stratified_kfold(ds, folds, repeats, plan_rng);
    const ComparisonReport report =
        compare(methods, flags.params(), ds, plan, rng.substream("methods"), jobs, sided);
    out << (format == "csv" ? report.render_csv() : report.render_text());
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Imbalanced binary classification with evolutionary undersampling boosting",
                 "eusboost"};
    app.require_subcommand(1);

    // gen
    SyntheticSpec synth;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Write a synthetic two-Gaussian dataset as CSV");
    gen->add_option("--n", synth.n, "Total instances")->capture_default_str();
    gen->add_option("--d", synth.d, "Feature dimensions")->capture_default_str();
    gen->add_option("--ir", synth.ir, "Imbalance ratio (negatives / positives)")->capture_default_str();
    gen->add_option("--delta", synth.delta, "Distance between class means")->capture_default_str();
    gen->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output CSV path (default: standard output)");

    // shared
    std::string data;
    std::string label_col = "label";
    std::uint64_t seed = 1;
    HyperFlags flags;

    // train
    std::string method_arg;
    std::string model_out;
    auto* train = app.add_subcommand("train", "Train one ensemble method and save the model");
    train->add_option("--method", method_arg, "Ensemble method")
        ->required()
        ->transform(CLI::IsMember(kMethodChoices, CLI::ignore_case));
    train->add_option("--data", data, "Training CSV")->required();
    train->add_option("--label-col", label_col, "Label column name")->capture_default_str();
    train->add_option("--seed", seed, "Random seed")->capture_default_str();
    train->add_option("--out", model_out, "Model output path")->required();
    flags.attach(train, true);

    // predict / evaluate
    std::string model_path;
    auto* predict_cmd = app.add_subcommand("predict", "Score rows with a saved model");
    predict_cmd->add_option("--model", model_path, "Model file")->required();
    predict_cmd->add_option("--data", data, "CSV to score")->required();
    predict_cmd->add_option("--label-col", label_col, "Label column to ignore if present")
        ->capture_default_str();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Report metrics of a saved model on labelled data");
    evaluate_cmd->add_option("--model", model_path, "Model file")->required();
    evaluate_cmd->add_option("--data", data, "Labelled CSV")->required();
    evaluate_cmd->add_option("--label-col", label_col, "Label column name")->capture_default_str();

    // eus-select
    auto* eus_cmd = app.add_subcommand("eus-select", "Run evolutionary undersampling once");
    eus_cmd->add_option("--data", data, "Training CSV")->required();
    eus_cmd->add_option("--label-col", label_col, "Label column name")->capture_default_str();
    eus_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    flags.attach(eus_cmd, false);

    // compare
    std::string methods_arg = "bgg,bst,unb,rbb,ovb,rub,eub";
    std::size_t folds = 5;
    std::size_t repeats = 2;
    std::string format = "text";
    std::size_t jobs = 1;
    std::string sided = "two";
    auto* compare_cmd = app.add_subcommand("compare", "Cross-validate methods and test EUB against each");
    compare_cmd->add_option("--data", data, "Dataset CSV")->required();
    compare_cmd->add_option("--label-col", label_col, "Label column name")->capture_default_str();
    compare_cmd->add_option("--methods", methods_arg, "Comma-separated method tags")->capture_default_str();
    compare_cmd->add_option("--folds", folds, "Folds per repeat")->capture_default_str();
    compare_cmd->add_option("--repeats", repeats, "Cross-validation repeats")->capture_default_str();
    compare_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    compare_cmd->add_option("--format", format, "Report format")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "csv"}));
    compare_cmd->add_option("--jobs", jobs, "Worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    compare_cmd->add_option("--sided", sided, "Wilcoxon alternative")
        ->capture_default_str()
        ->check(CLI::IsMember({"two", "greater", "less"}));
    flags.attach(compare_cmd, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(synth, gen_out, out);
        if (train->parsed())
            return cmd_train(*parse_method(method_arg), data, label_col, flags, seed, model_out, out);
        if (predict_cmd->parsed()) return cmd_predict(model_path, data, label_col, out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(model_path, data, label_col, out);
        if (eus_cmd->parsed()) return cmd_eus_select(data, label_col, flags, seed, out);
        if (compare_cmd->parsed())
            return cmd_compare(data, label_col, methods_arg, folds, repeats, seed, flags, format,
                               jobs, sided, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace eusboost
