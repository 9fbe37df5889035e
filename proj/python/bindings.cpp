#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eusboost/core.hpp"
#include "eusboost/errors.hpp"
#include "eusboost/eus.hpp"
#include "eusboost/evaluation.hpp"
#include "eusboost/io.hpp"
#include "eusboost/metrics.hpp"

namespace py = pybind11;
using namespace eusboost;

namespace {

std::optional<Method> method_arg(const std::string& tag) {
    auto m = parse_method(tag);
    if (!m) throw py::value_error("unknown method '" + tag + "'");
    return m;
}

MethodParams make_params(std::size_t rounds, const WeakLearnerSpec& learner, const EusConfig& eus) {
    MethodParams p;
    p.rounds = rounds;
    p.learner = learner;
    p.eus = eus;
    return p;
}

ModelFile train_model(const std::string& method, const Dataset& ds, std::size_t rounds,
                      std::uint64_t seed, const WeakLearnerSpec& learner, const EusConfig& eus) {
    ModelFile file;
    file.method = *method_arg(method);
    file.params = make_params(rounds, learner, eus);
    RandomSource rng(seed, "train");
    {
        py::gil_scoped_release release;
        file.model = train_method(file.method, ds, file.params, rng);
    }
    file.dataset_fingerprint = fingerprint(ds);
    file.seed = seed;
    file.labels = ds.label_names();
    file.dim = ds.dim();
    return file;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Evolutionary undersampling boosting and reference ensembles for imbalanced data";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ArithmeticError);
    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_RuntimeError);
    py::register_exception<ModelFormatError>(m, "ModelFormatError", PyExc_ValueError);

    py::enum_<ClassLabel>(m, "ClassLabel")
        .value("NEGATIVE", ClassLabel::Negative)
        .value("POSITIVE", ClassLabel::Positive);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("n", &Dataset::size)
        .def_property_readonly("d", &Dataset::dim)
        .def_property_readonly("positive_label", [](const Dataset& ds) { return ds.label_names().positive; })
        .def_property_readonly("negative_label", [](const Dataset& ds) { return ds.label_names().negative; })
        .def_property_readonly("labels", &Dataset::labels)
        .def("row", [](const Dataset& ds, std::size_t i) {
            if (i >= ds.size()) throw py::index_error();
            auto r = ds.row(i);
            return std::vector<double>(r.begin(), r.end());
        })
        .def("count", &Dataset::count)
        .def("__len__", &Dataset::size);

    m.def("make_dataset", &make_dataset, py::arg("rows"), py::arg("labels"));
    m.def("imbalance_ratio", &imbalance_ratio);
    m.def("partition_by_class", [](const Dataset& ds) {
        auto p = partition_by_class(ds);
        return py::make_tuple(p.minority, p.majority);
    });
    m.def("load_csv", [](const std::string& path, const std::string& label_col) {
        return load_csv(path, label_col);
    }, py::arg("path"), py::arg("label_col") = "label");
    m.def("generate_synthetic",
          [](std::size_t n, std::size_t d, double ir, double delta, std::uint64_t seed) {
              return generate_synthetic({n, d, ir, delta, seed});
          },
          py::arg("n"), py::arg("d") = 2, py::arg("ir") = 9.0, py::arg("delta") = 2.0,
          py::arg("seed") = 1);

    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init([](std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn) {
                 return ConfusionMatrix{tp, fn, fp, tn};
             }),
             py::arg("tp"), py::arg("fn"), py::arg("fp"), py::arg("tn"))
        .def_readonly("tp", &ConfusionMatrix::tp)
        .def_readonly("fn", &ConfusionMatrix::fn)
        .def_readonly("fp", &ConfusionMatrix::fp)
        .def_readonly("tn", &ConfusionMatrix::tn)
        .def("__repr__", [](const ConfusionMatrix& c) {
            return "ConfusionMatrix(tp=" + std::to_string(c.tp) + ", fn=" + std::to_string(c.fn) +
                   ", fp=" + std::to_string(c.fp) + ", tn=" + std::to_string(c.tn) + ")";
        });
    m.def("confusion_matrix", [](const std::vector<ClassLabel>& predicted, const std::vector<ClassLabel>& actual) {
        return confusion_matrix(predicted, actual);
    });
    m.def("accuracy", &accuracy);
    m.def("sensitivity", &sensitivity);
    m.def("specificity", &specificity);
    m.def("precision", &precision);
    m.def("geometric_mean", &geometric_mean);
    m.def("auc_single_point", &auc_single_point);
    m.def("f_measure", &f_measure);

    py::class_<WeakLearnerSpec>(m, "WeakLearnerSpec")
        .def(py::init([](const std::string& kind, int max_depth, double smoothing) {
                 WeakLearnerSpec s;
                 if (kind == "stump")
                     s.kind = LearnerKind::Stump;
                 else if (kind == "tree")
                     s.kind = LearnerKind::Tree;
                 else
                     throw py::value_error("learner kind must be 'tree' or 'stump'");
                 s.max_depth = max_depth;
                 s.smoothing = smoothing;
                 s.validate();
                 return s;
             }),
             py::arg("kind") = "tree", py::arg("max_depth") = 3, py::arg("smoothing") = 1.0);

    py::class_<EusConfig>(m, "EusConfig")
        .def(py::init<>())
        .def_readwrite("population", &EusConfig::population)
        .def_readwrite("penalty", &EusConfig::penalty)
        .def_readwrite("diversity_weight", &EusConfig::diversity_weight)
        .def_readwrite("crossover_rate", &EusConfig::crossover_rate)
        .def_readwrite("mutation_rate", &EusConfig::mutation_rate)
        .def_readwrite("max_evaluations", &EusConfig::max_evaluations)
        .def_readwrite("elitism", &EusConfig::elitism);

    m.def("loo_1nn_gm", [](const Dataset& ds, const std::vector<std::uint8_t>& mask) {
        return loo_1nn_gm(ds, Chromosome(mask));
    });
    m.def("eus_fitness",
          [](const Dataset& ds, const std::vector<std::uint8_t>& mask, const EusConfig& cfg,
             const std::vector<std::vector<std::uint8_t>>& prior) {
              EusContext ctx(ds);
              for (const auto& p : prior) ctx.add_prior_mask(Chromosome(p));
              return fitness(Chromosome(mask), cfg, ctx);
          },
          py::arg("dataset"), py::arg("mask"), py::arg("config") = EusConfig{},
          py::arg("prior_masks") = std::vector<std::vector<std::uint8_t>>{});
    m.def("eus_select",
          [](const Dataset& ds, std::uint64_t seed, const EusConfig& cfg) {
              EusContext ctx(ds);
              RandomSource rng(seed, "eus-select");
              EusResult r;
              {
                  py::gil_scoped_release release;
                  r = evolve(cfg, ctx, rng);
              }
              std::vector<std::size_t> ids;
              for (std::size_t j = 0; j < r.best.size(); ++j)
                  if (r.best.test(j)) ids.push_back(ctx.partition().majority[j]);
              return py::make_tuple(r.best.bits(), ids, r.fitness);
          },
          py::arg("dataset"), py::arg("seed") = 1, py::arg("config") = EusConfig{});
    m.def("exhaustive_best", [](const Dataset& ds, const EusConfig& cfg) {
        EusContext ctx(ds);
        auto [best, fit] = exhaustive_best(cfg, ctx);
        return py::make_tuple(best.bits(), fit);
    }, py::arg("dataset"), py::arg("config") = EusConfig{});

    py::class_<ModelFile>(m, "Model")
        .def_property_readonly("method", [](const ModelFile& f) { return std::string(method_tag(f.method)); })
        .def_property_readonly("size", [](const ModelFile& f) {
            return std::visit([](const auto& e) -> std::size_t {
                if constexpr (std::is_same_v<std::decay_t<decltype(e)>, BoostedEnsemble>)
                    return e.rounds.size();
                else
                    return e.members.size();
            }, f.model);
        })
        .def_property_readonly("dataset_fingerprint", [](const ModelFile& f) { return f.dataset_fingerprint; })
        .def("predict", [](const ModelFile& f, const std::vector<std::vector<double>>& rows) {
            py::list out;
            for (const auto& r : rows) {
                const Prediction p = predict(f.model, r);
                out.append(py::make_tuple(f.labels.name_of(p.label), p.score));
            }
            return out;
        })
        .def("save", [](const ModelFile& f, const std::string& path) { save_model(f, path); })
        .def("to_json", &serialize_model)
        .def_static("load", [](const std::string& path) { return load_model(path); });

    m.def("train", &train_model, py::arg("method"), py::arg("dataset"), py::arg("rounds") = 10,
          py::arg("seed") = 1, py::arg("learner") = WeakLearnerSpec{},
          py::arg("eus") = EusConfig{});

    m.def("wilcoxon_signed_rank",
          [](const std::vector<double>& a, const std::vector<double>& b, const std::string& sided) {
              Sidedness s = Sidedness::TwoSided;
              if (sided == "greater")
                  s = Sidedness::Greater;
              else if (sided == "less")
                  s = Sidedness::Less;
              else if (sided != "two-sided")
                  throw py::value_error("sided must be 'two-sided', 'greater' or 'less'");
              return wilcoxon_signed_rank(a, b, s);
          },
          py::arg("a"), py::arg("b"), py::arg("sided") = "two-sided");

    m.def("compare",
          [](const Dataset& ds, const std::vector<std::string>& methods, std::size_t folds,
             std::size_t repeats, std::uint64_t seed, std::size_t rounds,
             const WeakLearnerSpec& learner, const EusConfig& eus, std::size_t jobs) {
              std::vector<Method> ms;
              for (const auto& t : methods) ms.push_back(*method_arg(t));
              RandomSource rng(seed, "compare");
              RandomSource plan_rng = rng.substream("folds");
              ComparisonReport report;
              {
                  py::gil_scoped_release release;
                  const FoldPlan plan = stratified_kfold(ds, folds, repeats, plan_rng);
                  report = compare(ms, make_params(rounds, learner, eus), ds, plan,
                                   rng.substream("methods"), jobs);
              }
              py::dict means;
              for (const auto& r : report.results) {
                  py::dict row;
                  for (Measure meas : kReportedMeasures) {
                      auto v = r.mean(meas);
                      row[py::str(std::string(measure_name(meas)))] = v ? py::cast(*v) : py::none();
                  }
                  means[py::str(std::string(method_tag(r.method)))] = row;
              }
              py::dict out;
              out["means"] = means;
              out["text"] = report.render_text();
              out["csv"] = report.render_csv();
              return out;
          },
          py::arg("dataset"),
          py::arg("methods") = std::vector<std::string>{"BGG", "BST", "UNB", "RBB", "OVB", "RUB", "EUB"},
          py::arg("folds") = 5, py::arg("repeats") = 2, py::arg("seed") = 1, py::arg("rounds") = 10,
          py::arg("learner") = WeakLearnerSpec{}, py::arg("eus") = EusConfig{}, py::arg("jobs") = 1);
}
