// lcemap: learned-concepts embedding pipeline from the command line.
//
//   lcemap pipeline --config bundle/config.json --out results
//   lcemap embed profiles/*.json --components 3 --out results
//   lcemap gen-fixture --out bundle --models 9 --clusters 3 --seed 42

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lce/errors.hpp"
#include "lce/fixture.hpp"
#include "lce/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

struct PipelineFlags {
    std::vector<std::string> profiles;
    std::string config;
    std::string performance;
    std::string predictions;
    double iou_threshold = lce::kDefaultIouThreshold;
    int components = lce::kDefaultComponents;
    std::string k_range;
    std::uint64_t seed = lce::kDefaultSeed;
    int knn_k = lce::kDefaultKnnK;
    int resolution = lce::kDefaultResolution;
    std::string out;
    bool spearman = false;
};

struct Options {
    CLI::Option* iou = nullptr;
    CLI::Option* components = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* knn = nullptr;
    CLI::Option* resolution = nullptr;
};

Options add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    Options o;
    cmd->add_option("profiles", f.profiles, "Profile JSON files (one per model)");
    cmd->add_option("--config", f.config, "JSON config file; flags override its values");
    cmd->add_option("--performance", f.performance, "Performance CSV (model,task,dataset,metric,value)");
    cmd->add_option("--predictions", f.predictions, "Directory of <dataset>/<model>.csv prediction files");
    o.iou = cmd->add_option("--iou-threshold", f.iou_threshold, "Minimum IoU for a unit to keep its concept");
    o.components = cmd->add_option("--components", f.components, "Principal components to keep");
    cmd->add_option("--k-range", f.k_range, "KMeans cluster counts to scan, e.g. 1..8");
    o.seed = cmd->add_option("--seed", f.seed, "KMeans seed");
    o.knn = cmd->add_option("--knn-k", f.knn_k, "Neighbours for performance interpolation");
    o.resolution = cmd->add_option("--resolution", f.resolution, "Performance field grid resolution");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_flag("--spearman", f.spearman, "Use Spearman instead of Pearson correlation");
    return o;
}

lce::PipelineConfig build_config(const PipelineFlags& f, const Options& o) {
    lce::PipelineConfig c;
    if (!f.config.empty()) c = lce::load_config(f.config);
    if (!f.profiles.empty()) c.profile_paths.assign(f.profiles.begin(), f.profiles.end());
    if (!f.performance.empty()) c.performance_path = f.performance;
    if (!f.predictions.empty()) c.predictions_dir = f.predictions;
    if (o.iou->count()) c.iou_threshold = f.iou_threshold;
    if (o.components->count()) c.pca_components = f.components;
    if (!f.k_range.empty()) c.k_range = lce::parse_k_range(f.k_range);
    if (o.seed->count()) c.seed = f.seed;
    if (o.knn->count()) c.knn_k = f.knn_k;
    if (o.resolution->count()) c.grid_resolution = f.resolution;
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.spearman) c.method = lce::CorrelationMethod::Spearman;
    return c;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw lce::ValidationError("bad integer list '" + text + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learned-concepts embedding of vision models from per-unit concept profiles"};
    app.set_version_flag("--version", std::string(lce::kToolVersion));
    app.require_subcommand(1);

    struct Sub {
        lce::Stage stage;
        const char* name;
        const char* help;
    };
    const std::vector<Sub> subs{
        {lce::Stage::Ingest, "ingest", "Validate and threshold profiles; write abstracted profiles"},
        {lce::Stage::Matrix, "matrix", "Build the concept superset and normalized model x concept matrix"},
        {lce::Stage::Embed, "embed", "Fit the PCA embedding"},
        {lce::Stage::Cluster, "cluster", "KMeans with elbow selection and region labels"},
        {lce::Stage::Link, "link", "Axis/category and axis/performance correlations, KNN fields"},
        {lce::Stage::Ensemble, "ensemble", "Pairwise soft-vote ensemble gain matrices"},
        {lce::Stage::Report, "report", "SVG plots and a markdown summary"},
        {lce::Stage::Pipeline, "pipeline", "Run every stage and write all artifacts"},
    };

    std::vector<PipelineFlags> flags(subs.size());
    std::vector<Options> options(subs.size());
    std::vector<CLI::App*> commands;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        commands.push_back(app.add_subcommand(subs[i].name, subs[i].help));
        options[i] = add_pipeline_flags(commands.back(), flags[i]);
    }

    std::string fixture_out;
    std::uint64_t fixture_seed = lce::kDefaultSeed;
    lce::FixtureSpec fixture_spec;
    std::string fixture_concepts = "12,10,6,4";
    auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic bundle with planted structure");
    gen->add_option("--out", fixture_out, "Bundle directory")->required();
    gen->add_option("--seed", fixture_seed, "Generator seed");
    gen->add_option("--models", fixture_spec.models, "Number of models");
    gen->add_option("--clusters", fixture_spec.clusters, "Planted clusters");
    gen->add_option("--concepts", fixture_concepts, "Concepts per category: object,part,material,color");
    gen->add_option("--samples", fixture_spec.samples, "Prediction samples per dataset");
    gen->add_option("--classes", fixture_spec.classes, "Classes per dataset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (gen->parsed()) {
            const auto counts = parse_int_list(fixture_concepts);
            if (counts.size() != 4) throw lce::ValidationError("--concepts needs four comma-separated counts");
            std::copy(counts.begin(), counts.end(), fixture_spec.concepts_per_category.begin());
            const auto bundle = lce::generate_fixture(fixture_spec, fixture_seed);
            for (const auto& f : lce::write_fixture(bundle, fixture_out)) std::cout << f << '\n';
            return 0;
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!commands[i]->parsed()) continue;
            const auto config = build_config(flags[i], options[i]);
            const auto manifest = lce::run_pipeline(config, subs[i].stage);
            for (const auto& note : manifest.notes) std::cerr << "note: " << note << '\n';
            for (const auto& [name, digest] : manifest.artifacts)
                std::cout << (config.output_dir / name).generic_string() << '\n';
            return 0;
        }
    } catch (const lce::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const lce::ComputationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitValidation;
}
