#include "lce/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lce/concept_matrix.hpp"
#include "lce/embedding.hpp"
#include "lce/errors.hpp"
#include "lce/format.hpp"
#include "lce/random.hpp"

namespace lce {

namespace {

std::string numbered(const std::string& prefix, int i, int width) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*d", width, i);
    return prefix + "_" + buf;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

}  // namespace

FixtureBundle generate_fixture(const FixtureSpec& spec, std::uint64_t seed) {
    if (spec.models < 3) throw ValidationError("fixture: need at least 3 models");
    if (spec.clusters < 1 || spec.clusters > spec.models)
        throw ValidationError("fixture: clusters must lie in [1, models]");
    int n_concepts = 0;
    for (int c : spec.concepts_per_category) {
        if (c < 0) throw ValidationError("fixture: negative concept count");
        n_concepts += c;
    }
    if (n_concepts < 2) throw ValidationError("fixture: need at least two concepts");
    if (spec.samples < 1 || spec.classes < 2) throw ValidationError("fixture: need samples >= 1 and classes >= 2");

    constexpr int kMaxBase = 30;
    constexpr int kSubThreshold = 15;
    constexpr int kUnassigned = 25;
    const std::size_t worst = static_cast<std::size_t>(n_concepts) * (kMaxBase + 1) + kSubThreshold + kUnassigned;
    if (spec.layer_width < worst)
        throw ValidationError("fixture: layer_width " + std::to_string(spec.layer_width) + " too small (need " +
                              std::to_string(worst) + ")");

    Rng rng(seed);
    FixtureBundle b;
    b.seed = seed;
    b.clusters = spec.clusters;

    std::vector<Concept> concepts;
    for (auto cat : kCategories) {
        const int count = spec.concepts_per_category[index_of(cat)];
        const int width = count >= 100 ? 3 : 2;
        for (int i = 1; i <= count; ++i) concepts.push_back({numbered(std::string(to_string(cat)), i, width), cat});
    }

    std::vector<std::vector<int>> base(static_cast<std::size_t>(spec.clusters));
    for (auto& row : base) {
        row.resize(concepts.size());
        for (auto& v : row) v = static_cast<int>(rng.below(kMaxBase + 1));
    }

    const int name_width = spec.models >= 100 ? 3 : 2;
    for (int m = 0; m < spec.models; ++m) {
        const int cluster = m % spec.clusters;
        b.partition.push_back(cluster);
        DissectProfile p;
        p.model_name = numbered("model", m + 1, name_width);
        p.layer_name = "layer4";
        p.layer_width = spec.layer_width;
        std::size_t unit = 0;
        for (std::size_t j = 0; j < concepts.size(); ++j) {
            const int jitter = static_cast<int>(rng.below(3)) - 1;
            const int count = std::max(0, base[static_cast<std::size_t>(cluster)][j] + jitter);
            for (int u = 0; u < count; ++u)
                p.units.push_back({unit++, concepts[j].name, concepts[j].category, round4(rng.uniform(0.05, 0.40))});
        }
        for (int u = 0; u < kSubThreshold; ++u) {
            const auto& c = concepts[rng.below(concepts.size())];
            p.units.push_back({unit++, c.name, c.category, round4(rng.uniform(0.0, 0.039))});
        }
        for (int u = 0; u < kUnassigned; ++u)
            p.units.push_back({unit++, std::nullopt, std::nullopt, round4(rng.uniform(0.0, 0.039))});
        b.profiles.push_back(std::move(p));
    }

    // Planted performance: affine image of the first principal component.
    std::vector<DissectProfile> filtered;
    for (const auto& p : b.profiles) filtered.push_back(filter_by_iou(p, kDefaultIouThreshold));
    const auto superset = build_superset(filtered);
    const auto matrix = build_matrix(filtered, superset);
    const auto emb = fit_pca(matrix, 1);
    const double scale = emb.scores.col(0).cwiseAbs().maxCoeff();

    std::vector<PerformanceRecord> perf;
    for (int m = 0; m < spec.models; ++m) {
        const auto& name = b.profiles[static_cast<std::size_t>(m)].model_name;
        perf.push_back({name, kPlantedPc1Group.task, kPlantedPc1Group.dataset, kPlantedPc1Group.metric,
                        0.5 + 0.4 * emb.scores(m, 0) / scale});
        perf.push_back({name, "noise", "uniform", "score", round4(rng.uniform(0.2, 0.8))});
    }

    for (const auto& dataset : spec.datasets) {
        std::vector<int> labels(static_cast<std::size_t>(spec.samples));
        std::vector<std::string> ids(static_cast<std::size_t>(spec.samples));
        for (int i = 0; i < spec.samples; ++i) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.classes)));
            ids[static_cast<std::size_t>(i)] = numbered("s", i + 1, 4);
        }
        for (const auto& profile : b.profiles) {
            PredictionSet ps;
            ps.model_name = profile.model_name;
            ps.dataset = dataset;
            ps.sample_ids = ids;
            ps.labels = labels;
            ps.probs.resize(spec.samples, spec.classes);
            const double skill = rng.uniform(0.35, 0.85);
            for (int i = 0; i < spec.samples; ++i) {
                Eigen::RowVectorXd logits(spec.classes);
                for (int c = 0; c < spec.classes; ++c) logits[c] = 2.0 * rng.uniform();
                if (rng.uniform() < skill) logits[labels[static_cast<std::size_t>(i)]] += 3.0;
                const Eigen::RowVectorXd e = (logits.array() - logits.maxCoeff()).exp();
                ps.probs.row(i) = e / e.sum();
            }
            perf.push_back({ps.model_name, "classification", dataset, "top1", accuracy(ps)});
            b.predictions.push_back(std::move(ps));
        }
    }
    b.performance = PerformanceTable(std::move(perf));
    return b;
}

std::vector<std::string> write_fixture(const FixtureBundle& bundle, const std::filesystem::path& dir) {
    std::vector<std::string> written;
    auto emit = [&](const std::string& rel, const std::string& text) {
        write_text(dir / rel, text);
        written.push_back(rel);
    };

    nlohmann::json config;
    config["profiles"] = nlohmann::json::array();
    nlohmann::json truth;
    truth["seed"] = bundle.seed;
    truth["clusters"] = bundle.clusters;
    truth["models"] = nlohmann::json::array();
    truth["partition"] = bundle.partition;
    truth["planted_group"] = kPlantedPc1Group.key();

    for (const auto& p : bundle.profiles) {
        const std::string rel = "profiles/" + p.model_name + ".json";
        emit(rel, to_json(p));
        config["profiles"].push_back(rel);
        truth["models"].push_back(p.model_name);
    }

    std::string perf = "model,task,dataset,metric,value\n";
    for (const auto& r : bundle.performance.records())
        perf += csv_escape(r.model) + "," + csv_escape(r.task) + "," + csv_escape(r.dataset) + "," +
                csv_escape(r.metric) + "," + format_real(r.value) + "\n";
    emit("performance.csv", perf);

    for (const auto& ps : bundle.predictions) {
        std::string text = "sample_id,label";
        for (int c = 0; c < ps.n_classes(); ++c) text += ",p_" + std::to_string(c);
        text += '\n';
        for (std::size_t i = 0; i < ps.n_samples(); ++i) {
            text += ps.sample_ids[i] + "," + std::to_string(ps.labels[i]);
            for (int c = 0; c < ps.n_classes(); ++c) {
                char buf[32];
                std::snprintf(buf, sizeof buf, ",%.15g", ps.probs(static_cast<Eigen::Index>(i), c));
                text += buf;
            }
            text += '\n';
        }
        emit("predictions/" + ps.dataset + "/" + ps.model_name + ".csv", text);
    }

    config["performance"] = "performance.csv";
    config["predictions_dir"] = "predictions";
    config["seed"] = 42;
    emit("config.json", config.dump(2) + "\n");
    emit("ground_truth.json", truth.dump(2) + "\n");

    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace lce
