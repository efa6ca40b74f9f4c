#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lce/clustering.hpp"
#include "lce/concept_matrix.hpp"
#include "lce/correlation.hpp"
#include "lce/embedding.hpp"
#include "lce/ensemble.hpp"
#include "lce/errors.hpp"
#include "lce/fixture.hpp"
#include "lce/pipeline.hpp"
#include "lce/profile.hpp"
#include "lce/svg.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::dict counts_dict(const lce::AbstractedProfile& a) {
    py::dict d;
    for (auto c : lce::kCategories) d[py::str(std::string(lce::to_string(c)))] = a[c];
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Learned-concepts embedding: profiles, PCA, clustering, correlations, ensembles";
    m.attr("__version__") = LCE_VERSION_INFO;

    py::register_exception<lce::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<lce::ComputationError>(m, "ComputationError", PyExc_ArithmeticError);

    py::enum_<lce::ConceptCategory>(m, "ConceptCategory")
        .value("Object", lce::ConceptCategory::Object)
        .value("Part", lce::ConceptCategory::Part)
        .value("Material", lce::ConceptCategory::Material)
        .value("Color", lce::ConceptCategory::Color);
    py::enum_<lce::AbstractionMode>(m, "AbstractionMode")
        .value("All", lce::AbstractionMode::All)
        .value("Unique", lce::AbstractionMode::Unique);
    py::enum_<lce::RegionLabel>(m, "RegionLabel")
        .value("A", lce::RegionLabel::A)
        .value("B", lce::RegionLabel::B)
        .value("C", lce::RegionLabel::C)
        .value("Other", lce::RegionLabel::Other);

    // --- profiles -----------------------------------------------------------
    py::class_<lce::UnitAssignment>(m, "UnitAssignment")
        .def(py::init<>())
        .def_readwrite("unit_id", &lce::UnitAssignment::unit_id)
        .def_readwrite("concept_name", &lce::UnitAssignment::concept_name)
        .def_readwrite("category", &lce::UnitAssignment::category)
        .def_readwrite("iou", &lce::UnitAssignment::iou)
        .def("assigned", &lce::UnitAssignment::assigned);
    py::class_<lce::DissectProfile>(m, "DissectProfile")
        .def(py::init<>())
        .def_readwrite("model_name", &lce::DissectProfile::model_name)
        .def_readwrite("layer_name", &lce::DissectProfile::layer_name)
        .def_readwrite("layer_width", &lce::DissectProfile::layer_width)
        .def_readwrite("units", &lce::DissectProfile::units)
        .def("assigned_count", &lce::DissectProfile::assigned_count)
        .def(py::self == py::self);
    m.def("parse_profile", [](const std::string& doc) { return lce::parse_profile(doc); }, "document"_a);
    m.def("load_profile", &lce::load_profile, "path"_a);
    m.def("to_json", &lce::to_json, "profile"_a);
    m.def("filter_by_iou", &lce::filter_by_iou, "profile"_a, "threshold"_a = lce::kDefaultIouThreshold);
    m.def(
        "abstract_profile",
        [](const lce::DissectProfile& p, lce::AbstractionMode mode) { return counts_dict(lce::abstract_profile(p, mode)); },
        "profile"_a, "mode"_a, "Per-category counts as a dict keyed by category name.");

    // --- concept matrix -----------------------------------------------------
    py::class_<lce::Concept>(m, "Concept")
        .def_readonly("name", &lce::Concept::name)
        .def_readonly("category", &lce::Concept::category)
        .def("__repr__", [](const lce::Concept& c) {
            return "Concept(" + c.name + ", " + std::string(lce::to_string(c.category)) + ")";
        });
    py::class_<lce::ConceptSuperset>(m, "ConceptSuperset")
        .def_property_readonly("concepts", &lce::ConceptSuperset::concepts)
        .def_property_readonly("category_totals", &lce::ConceptSuperset::category_totals)
        .def("__len__", &lce::ConceptSuperset::size);
    py::class_<lce::ConceptMatrix>(m, "ConceptMatrix")
        .def_readonly("model_names", &lce::ConceptMatrix::model_names)
        .def_readonly("superset", &lce::ConceptMatrix::superset)
        .def_readonly("raw_counts", &lce::ConceptMatrix::raw_counts)
        .def_readonly("normalized", &lce::ConceptMatrix::normalized);
    m.def("build_superset", [](const std::vector<lce::DissectProfile>& ps) { return lce::build_superset(ps); },
          "profiles"_a);
    m.def(
        "build_matrix",
        [](const std::vector<lce::DissectProfile>& ps, const lce::ConceptSuperset& s) { return lce::build_matrix(ps, s); },
        "profiles"_a, "superset"_a);

    // --- embedding ----------------------------------------------------------
    py::class_<lce::LceEmbedding>(m, "LceEmbedding")
        .def_readonly("model_names", &lce::LceEmbedding::model_names)
        .def_readonly("concepts", &lce::LceEmbedding::concepts)
        .def_readonly("scores", &lce::LceEmbedding::scores)
        .def_readonly("loadings", &lce::LceEmbedding::loadings)
        .def_readonly("explained_variance_ratio", &lce::LceEmbedding::explained_variance_ratio)
        .def_readonly("column_means", &lce::LceEmbedding::column_means)
        .def_property_readonly("components", &lce::LceEmbedding::components);
    m.def("fit_pca", py::overload_cast<const lce::ConceptMatrix&, int>(&lce::fit_pca), "matrix"_a,
          "k"_a = lce::kDefaultComponents);
    m.def(
        "fit_pca_array",
        [](const Eigen::MatrixXd& data, int k) {
            std::vector<std::string> rows;
            std::vector<lce::Concept> cols;
            for (Eigen::Index i = 0; i < data.rows(); ++i) rows.push_back("row" + std::to_string(i));
            for (Eigen::Index j = 0; j < data.cols(); ++j) cols.push_back({"col" + std::to_string(j), lce::ConceptCategory::Object});
            return lce::fit_pca(data, rows, cols, k);
        },
        "data"_a, "k"_a, "PCA of an arbitrary rows x columns array.");
    m.def("project", &lce::project, "embedding"_a, "row"_a);
    m.def("top_loadings", &lce::top_loadings, "embedding"_a, "component"_a, "n"_a);

    // --- clustering ---------------------------------------------------------
    py::class_<lce::KMeansResult>(m, "KMeansResult")
        .def_readonly("assignments", &lce::KMeansResult::assignments)
        .def_readonly("centroids", &lce::KMeansResult::centroids)
        .def_readonly("inertia", &lce::KMeansResult::inertia)
        .def_readonly("inertia_trace", &lce::KMeansResult::inertia_trace);
    py::class_<lce::ClusteringResult>(m, "ClusteringResult")
        .def_readonly("k", &lce::ClusteringResult::k)
        .def_readonly("model_names", &lce::ClusteringResult::model_names)
        .def_readonly("assignments", &lce::ClusteringResult::assignments)
        .def_readonly("centroids", &lce::ClusteringResult::centroids)
        .def_readonly("inertia", &lce::ClusteringResult::inertia)
        .def_readonly("inertia_curve", &lce::ClusteringResult::inertia_curve)
        .def_readwrite("region_labels", &lce::ClusteringResult::region_labels);
    m.def(
        "kmeans_fit",
        [](const Eigen::MatrixXd& points, int k, std::uint64_t seed) { return lce::kmeans_fit(points, k, seed); },
        "points"_a, "k"_a, "seed"_a = lce::kDefaultSeed);
    m.def(
        "elbow_select",
        [](const Eigen::MatrixXd& points, std::vector<std::string> names, int k_min, int k_max, std::uint64_t seed) {
            return lce::elbow_select(points, std::move(names), k_min, k_max, seed);
        },
        "points"_a, "model_names"_a, "k_min"_a = 1, "k_max"_a = 8, "seed"_a = lce::kDefaultSeed);
    m.def("label_regions", &lce::label_regions, "clustering"_a, "embedding"_a);

    // --- correlation --------------------------------------------------------
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return lce::pearson(x, y); },
          "x"_a, "y"_a);
    m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return lce::spearman(x, y); },
          "x"_a, "y"_a);
    py::class_<lce::PerfGroup>(m, "PerfGroup")
        .def(py::init<std::string, std::string, std::string>(), "task"_a, "dataset"_a, "metric"_a)
        .def_readonly("task", &lce::PerfGroup::task)
        .def_readonly("dataset", &lce::PerfGroup::dataset)
        .def_readonly("metric", &lce::PerfGroup::metric)
        .def("key", &lce::PerfGroup::key);
    py::class_<lce::PerformanceTable>(m, "PerformanceTable")
        .def(py::init([](const std::vector<std::tuple<std::string, std::string, std::string, std::string, double>>& rows) {
                 std::vector<lce::PerformanceRecord> recs;
                 for (const auto& [mo, t, d, me, v] : rows) recs.push_back({mo, t, d, me, v});
                 return lce::PerformanceTable(std::move(recs));
             }),
             "records"_a, "Rows of (model, task, dataset, metric, value).")
        .def_static("load", &lce::PerformanceTable::load, "path"_a)
        .def("groups", &lce::PerformanceTable::groups);
    py::class_<lce::CorrelationRow>(m, "CorrelationRow")
        .def_readonly("feature", &lce::CorrelationRow::feature)
        .def_readonly("component", &lce::CorrelationRow::component)
        .def_readonly("r", &lce::CorrelationRow::r)
        .def_readonly("n_points", &lce::CorrelationRow::n_points);
    py::class_<lce::CorrelationReport>(m, "CorrelationReport")
        .def_readonly("rows", &lce::CorrelationReport::rows)
        .def_readonly("warnings", &lce::CorrelationReport::warnings);
    m.def(
        "axis_category_correlations",
        [](const lce::LceEmbedding& e, const std::vector<lce::DissectProfile>& ps) {
            return lce::axis_category_correlations(e, ps);
        },
        "embedding"_a, "profiles"_a);
    m.def(
        "axis_performance_correlations",
        [](const lce::LceEmbedding& e, const lce::PerformanceTable& t) { return lce::axis_performance_correlations(e, t); },
        "embedding"_a, "performance"_a);
    py::class_<lce::PerformanceField>(m, "PerformanceField")
        .def_readonly("axes", &lce::PerformanceField::axes)
        .def_readonly("k_neighbors", &lce::PerformanceField::k_neighbors)
        .def_readonly("resolution", &lce::PerformanceField::resolution)
        .def_property_readonly("values", [](const lce::PerformanceField& f) {
            std::vector<double> v;
            for (const auto& p : f.grid) v.push_back(p.value);
            return v;
        });
    m.def("knn_field", &lce::knn_field, "embedding"_a, "performance"_a, "group"_a,
          "axes"_a = std::array<int, 2>{0, 1}, "k"_a = lce::kDefaultKnnK, "resolution"_a = lce::kDefaultResolution);

    // --- ensembles ----------------------------------------------------------
    py::class_<lce::PredictionSet>(m, "PredictionSet")
        .def(py::init([](std::string model, std::string dataset, std::vector<std::string> ids, std::vector<int> labels,
                         Eigen::MatrixXd probs) {
                 lce::PredictionSet p{std::move(model), std::move(dataset), std::move(ids), std::move(labels),
                                      std::move(probs)};
                 p.validate();
                 return p;
             }),
             "model_name"_a, "dataset"_a, "sample_ids"_a, "labels"_a, "probs"_a)
        .def_readonly("model_name", &lce::PredictionSet::model_name)
        .def_readonly("dataset", &lce::PredictionSet::dataset)
        .def_readonly("probs", &lce::PredictionSet::probs);
    m.def("accuracy", py::overload_cast<const lce::PredictionSet&>(&lce::accuracy), "predictions"_a);
    m.def(
        "soft_vote_pair",
        [](const lce::PredictionSet& a, const lce::PredictionSet& b) {
            auto v = lce::soft_vote_pair(a, b);
            return py::make_tuple(v.probs, py::make_tuple(v.w1, v.w2));
        },
        "p1"_a, "p2"_a, "Returns (ensemble_probs, (w1, w2)).");
    py::class_<lce::EnsembleGainMatrix>(m, "EnsembleGainMatrix")
        .def_readonly("dataset", &lce::EnsembleGainMatrix::dataset)
        .def_readonly("model_names", &lce::EnsembleGainMatrix::model_names)
        .def_readonly("solo_accuracy", &lce::EnsembleGainMatrix::solo_accuracy)
        .def_readonly("gain", &lce::EnsembleGainMatrix::gain);
    m.def("gain_matrix", [](const std::vector<lce::PredictionSet>& sets) { return lce::gain_matrix(sets); }, "sets"_a);

    m.def("emit_scatter", &lce::emit_scatter, "embedding"_a, "clustering"_a, "axes"_a = std::array<int, 2>{0, 1});
    m.def("emit_heatmap", &lce::emit_heatmap, "matrix"_a);

    // --- pipeline -----------------------------------------------------------
    m.def(
        "gen_fixture",
        [](const std::filesystem::path& out, int models, int clusters, std::uint64_t seed) {
            lce::FixtureSpec spec;
            spec.models = models;
            spec.clusters = clusters;
            return lce::write_fixture(lce::generate_fixture(spec, seed), out);
        },
        "out"_a, "models"_a = 9, "clusters"_a = 3, "seed"_a = lce::kDefaultSeed,
        "Write a synthetic bundle; returns the written relative paths.");
    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config, const std::filesystem::path& out) {
            auto c = lce::load_config(config);
            c.output_dir = out;
            return lce::run_pipeline(c).artifacts;
        },
        "config"_a, "out"_a, "Run every stage from a JSON config; returns (artifact, sha256) pairs.");
}
