#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "discbench/bench.hpp"
#include "discbench/classifier.hpp"
#include "discbench/cli.hpp"
#include "discbench/data.hpp"
#include "discbench/errors.hpp"
#include "discbench/extensions.hpp"
#include "discbench/reducers.hpp"
#include "discbench/scatter.hpp"
#include "discbench/stats.hpp"
#include "discbench/synthetic.hpp"

#include <sstream>

namespace py = pybind11;
using namespace discbench;

namespace {

FeatureDataset make_dataset(Matrix features, std::vector<int> labels, int num_classes, std::string backbone,
                            std::string dataset) {
  FeatureDataset d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.num_classes = num_classes;
  d.backbone_name = std::move(backbone);
  d.dataset_name = std::move(dataset);
  d.validate();
  return d;
}

ReducerConfig make_config(const std::string& method, std::optional<int> out_dim, int lfda_neighbors,
                          int nca_max_iter, std::optional<double> rlda_shrinkage,
                          std::optional<int> rda_components, int dsb_rounds, double dsb_weight_growth,
                          std::uint64_t seed) {
  ReducerConfig c;
  c.method = parse_method(method);
  c.out_dim = out_dim;
  c.lfda_neighbors = lfda_neighbors;
  c.nca_max_iter = nca_max_iter;
  c.rlda_shrinkage = rlda_shrinkage;
  c.rda.residual_components = rda_components;
  c.dsb.rounds = dsb_rounds;
  c.dsb.weight_growth = dsb_weight_growth;
  c.seed = seed;
  c.validate();
  return c;
}

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["method"] = r.method;
  d["backbone"] = r.backbone;
  d["dataset"] = r.dataset;
  d["seed"] = r.seed;
  d["fraction"] = r.fraction;
  d["out_dim"] = r.out_dim;
  d["accuracy"] = r.accuracy;
  d["fit_seconds"] = r.fit_seconds;
  d["train_seconds"] = r.train_seconds;
  d["total_seconds"] = r.total_seconds;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Supervised dimensionality reduction and linear-probe benchmarking.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<CorruptionError>(m, "CorruptionError", base.ptr());
  py::register_exception<LengthError>(m, "LengthError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DegenerateClassError>(m, "DegenerateClassError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<RankCollapseError>(m, "RankCollapseError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<UndefinedCorrelationError>(m, "UndefinedCorrelationError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());

  py::class_<FeatureDataset>(m, "FeatureDataset")
      .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"), py::arg("num_classes"),
           py::arg("backbone") = "", py::arg("dataset") = "")
      .def_readonly("features", &FeatureDataset::features)
      .def_readonly("labels", &FeatureDataset::labels)
      .def_readonly("num_classes", &FeatureDataset::num_classes)
      .def_readonly("backbone", &FeatureDataset::backbone_name)
      .def_readonly("dataset", &FeatureDataset::dataset_name)
      .def_property_readonly("size", &FeatureDataset::size)
      .def_property_readonly("dim", &FeatureDataset::dim)
      .def("class_counts", &FeatureDataset::class_counts)
      .def("__repr__", [](const FeatureDataset& d) {
        std::ostringstream os;
        os << "FeatureDataset(N=" << d.size() << ", D=" << d.dim() << ", C=" << d.num_classes << ")";
        return os.str();
      });

  m.def("read_feature_file", &read_feature_file, py::arg("path"));
  m.def("write_feature_file", &write_feature_file, py::arg("dataset"), py::arg("path"));
  m.def("stratified_subsample", &stratified_subsample, py::arg("dataset"), py::arg("fraction"), py::arg("seed"));

  py::class_<Standardizer>(m, "Standardizer")
      .def_static("fit", &Standardizer::fit, py::arg("features"))
      .def_readonly("means", &Standardizer::means)
      .def_readonly("stds", &Standardizer::stds)
      .def("transform", &Standardizer::transform, py::arg("features"));

  py::class_<ScatterPair>(m, "ScatterPair")
      .def_readonly("between", &ScatterPair::s_b)
      .def_readonly("within", &ScatterPair::s_w);
  m.def(
      "scatter_matrices",
      [](const FeatureDataset& d, std::optional<std::vector<double>> weights) {
        if (!weights) return compute_scatter(d, compute_class_stats(d));
        const std::span<const double> w(*weights);
        return compute_scatter(d, compute_class_stats(d, w), w);
      },
      py::arg("dataset"), py::arg("weights") = py::none());
  m.def(
      "ledoit_wolf_alpha",
      [](const FeatureDataset& d) {
        const ClassStats stats = compute_class_stats(d);
        const Matrix centered = within_class_centered(d, stats);
        const Matrix s = centered.transpose() * centered / static_cast<double>(d.size());
        return ledoit_wolf_shrink(s, centered).alpha;
      },
      py::arg("dataset"), "Ledoit-Wolf intensity for the within-class covariance of `dataset`.");

  py::class_<Projection>(m, "Projection")
      .def_readonly("weights", &Projection::weights)
      .def_readonly("center", &Projection::center)
      .def_readonly("discriminant_values", &Projection::discriminant_values)
      .def_readonly("method", &Projection::method_name)
      .def_property_readonly("in_dim", &Projection::in_dim)
      .def_property_readonly("out_dim", &Projection::out_dim)
      .def("transform", [](const Projection& p, const Matrix& x) { return transform(p, x); }, py::arg("features"));

  m.def("method_names", [] {
    std::vector<std::string> names;
    for (Method method : kAllMethods) names.emplace_back(method_name(method));
    return names;
  });
  m.def(
      "fit",
      [](const std::string& method, const FeatureDataset& train, std::optional<int> out_dim, int lfda_neighbors,
         int nca_max_iter, std::optional<double> rlda_shrinkage, std::optional<int> rda_components, int dsb_rounds,
         double dsb_weight_growth, std::uint64_t seed) {
        const ReducerConfig c = make_config(method, out_dim, lfda_neighbors, nca_max_iter, rlda_shrinkage,
                                            rda_components, dsb_rounds, dsb_weight_growth, seed);
        py::gil_scoped_release release;
        return fit(c, train);
      },
      py::arg("method"), py::arg("train"), py::kw_only(), py::arg("out_dim") = py::none(),
      py::arg("lfda_neighbors") = 7, py::arg("nca_max_iter") = 50, py::arg("rlda_shrinkage") = py::none(),
      py::arg("rda_components") = py::none(), py::arg("dsb_rounds") = 2, py::arg("dsb_weight_growth") = 2.0,
      py::arg("seed") = 0);

  py::class_<ClassifierModel>(m, "ClassifierModel")
      .def_readonly("weights", &ClassifierModel::weights)
      .def_readonly("bias", &ClassifierModel::bias)
      .def_readonly("reg_c", &ClassifierModel::reg_c)
      .def_readonly("converged", &ClassifierModel::converged)
      .def_readonly("iterations", &ClassifierModel::iterations_used)
      .def_readonly("objective_trace", &ClassifierModel::objective_trace)
      .def("predict", [](const ClassifierModel& model, const Matrix& x) { return predict(model, x); },
           py::arg("features"));
  m.def(
      "train_classifier",
      [](const Matrix& x, const Labels& y, int num_classes, double reg_c, int max_iter, double tol) {
        TrainOptions o;
        o.reg_c = reg_c;
        o.max_iter = max_iter;
        o.tol = tol;
        py::gil_scoped_release release;
        return train_classifier(x, y, num_classes, o);
      },
      py::arg("features"), py::arg("labels"), py::arg("num_classes"), py::kw_only(), py::arg("reg_c") = 1.0,
      py::arg("max_iter") = 5000, py::arg("tol") = 1e-6);
  m.def("accuracy", &accuracy, py::arg("predicted"), py::arg("actual"));

  m.def(
      "run_trial",
      [](const std::string& method, const FeatureDataset& train, const FeatureDataset& test, std::uint64_t seed,
         std::optional<int> out_dim, bool timing) {
        ReducerConfig c;
        c.method = parse_method(method);
        c.out_dim = out_dim;
        c.seed = seed;
        TrialOptions o;
        o.timing = timing;
        TrialRecord r;
        {
          py::gil_scoped_release release;
          r = run_trial(c, train, test, seed, o);
        }
        return record_dict(r);
      },
      py::arg("method"), py::arg("train"), py::arg("test"), py::arg("seed") = 0, py::kw_only(),
      py::arg("out_dim") = py::none(), py::arg("timing") = true);

  m.def(
      "paired_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const TTestResult r = paired_t_test(a, b);
        return py::make_tuple(r.t_stat, r.p_value);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& a, const std::vector<double>& b) { return wilcoxon_signed_rank(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "pareto_frontier",
      [](const std::vector<std::tuple<std::string, double, double>>& rows) {
        std::vector<ParetoEntry> entries;
        for (const auto& [name, acc, secs] : rows) entries.push_back({name, acc, secs, false});
        std::vector<std::string> frontier;
        for (const ParetoEntry& e : pareto_frontier(std::move(entries)))
          if (!e.dominated) frontier.push_back(e.method);
        return frontier;
      },
      py::arg("entries"), "Names of the non-dominated (method, accuracy, seconds) entries, in input order.");
  m.def(
      "pearson_correlation",
      [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_correlation(x, y); },
      py::arg("x"), py::arg("y"));

  m.def(
      "synthetic_split",
      [](int num_classes, int dim, int informative_dims, double separation, int nuisance_rank, double nuisance_scale,
         std::uint64_t seed, int train_per_class, int test_per_class) {
        SyntheticSpec s;
        s.num_classes = num_classes;
        s.dim = dim;
        s.informative_dims = informative_dims;
        s.separation = separation;
        s.nuisance_rank = nuisance_rank;
        s.nuisance_scale = nuisance_scale;
        s.seed = seed;
        const SyntheticTask task(s);
        return py::make_tuple(task.sample(train_per_class, 0), task.sample(test_per_class, 1));
      },
      py::kw_only(), py::arg("num_classes") = 10, py::arg("dim") = 64, py::arg("informative_dims") = 9,
      py::arg("separation") = 1.5, py::arg("nuisance_rank") = 0, py::arg("nuisance_scale") = 0.0,
      py::arg("seed") = 0, py::arg("train_per_class") = 200, py::arg("test_per_class") = 100);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
