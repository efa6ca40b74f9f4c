#include "lce/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "lce/concept_matrix.hpp"
#include "lce/ensemble.hpp"
#include "lce/errors.hpp"
#include "lce/format.hpp"
#include "lce/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lce {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw ComputationError("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Ingest: return "ingest";
        case Stage::Matrix: return "matrix";
        case Stage::Embed: return "embed";
        case Stage::Cluster: return "cluster";
        case Stage::Link: return "link";
        case Stage::Ensemble: return "ensemble";
        case Stage::Report: return "report";
        case Stage::Pipeline: return "pipeline";
    }
    return "?";
}

std::pair<int, int> parse_k_range(std::string_view text) {
    const auto t = trim(text);
    std::size_t sep = t.find("..");
    std::size_t sep_len = 2;
    if (sep == std::string::npos) {
        sep = t.find_first_of("-:", 1);
        sep_len = 1;
    }
    if (sep == std::string::npos) throw ValidationError("k range '" + t + "' must look like 1..8");
    auto parse = [&](std::string_view s) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw ValidationError("k range '" + t + "' must look like 1..8");
        return v;
    };
    const std::string_view view(t);
    return {parse(view.substr(0, sep)), parse(view.substr(sep + sep_len))};
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");

    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

    PipelineConfig c;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "profiles") {
                for (const auto& p : value) c.profile_paths.push_back(resolve(p.get<std::string>()));
            } else if (key == "performance") {
                c.performance_path = resolve(value.get<std::string>());
            } else if (key == "predictions_dir") {
                c.predictions_dir = resolve(value.get<std::string>());
            } else if (key == "iou_threshold") {
                c.iou_threshold = value.get<double>();
            } else if (key == "components") {
                c.pca_components = value.get<int>();
            } else if (key == "k_range") {
                c.k_range = value.is_string() ? parse_k_range(value.get<std::string>())
                                              : std::pair<int, int>{value.at(0).get<int>(), value.at(1).get<int>()};
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "knn_k") {
                c.knn_k = value.get<int>();
            } else if (key == "resolution") {
                c.grid_resolution = value.get<int>();
            } else if (key == "output_dir") {
                c.output_dir = resolve(value.get<std::string>());
            } else if (key == "correlation") {
                const auto m = value.get<std::string>();
                if (m == "pearson") c.method = CorrelationMethod::Pearson;
                else if (m == "spearman") c.method = CorrelationMethod::Spearman;
                else throw ValidationError("config: correlation must be pearson or spearman");
            } else {
                throw ValidationError("config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return c;
}

void validate_config(const PipelineConfig& c) {
    if (!(c.iou_threshold >= 0.0 && c.iou_threshold <= 1.0)) throw ValidationError("iou threshold must lie in [0,1]");
    if (c.pca_components < 1) throw ValidationError("components must be positive");
    if (c.k_range.first < 1 || c.k_range.first > c.k_range.second)
        throw ValidationError("k range must satisfy 1 <= min <= max");
    if (c.knn_k < 1) throw ValidationError("knn k must be positive");
    if (c.grid_resolution < 2) throw ValidationError("resolution must be >= 2");
    if (c.output_dir.empty()) throw ValidationError("output directory not set");
    for (const auto& p : c.profile_paths) {
        if (!fs::is_regular_file(p)) throw ValidationError("profile file not found: " + p.string());
    }
    if (c.performance_path && !fs::is_regular_file(*c.performance_path))
        throw ValidationError("performance file not found: " + c.performance_path->string());
    if (c.predictions_dir && !fs::is_directory(*c.predictions_dir))
        throw ValidationError("predictions directory not found: " + c.predictions_dir->string());
    if (fs::exists(c.output_dir)) {
        if (!fs::is_directory(c.output_dir)) throw ValidationError("output path is not a directory");
        if (!fs::is_empty(c.output_dir) && !fs::exists(c.output_dir / "manifest.json"))
            throw ValidationError("output directory " + c.output_dir.string() +
                                  " is not empty and holds no previous run; refusing to overwrite");
    }
}

std::string RunManifest::to_json() const {
    json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["stage"] = stage;
    doc["config"] = json::parse(config_json);
    doc["inputs"] = json::array();
    for (const auto& [p, d] : inputs) doc["inputs"].push_back({{"path", p}, {"sha256", d}});
    doc["artifacts"] = json::array();
    for (const auto& [n, d] : artifacts) {
        json a{{"name", n}};
        if (!d.empty()) a["sha256"] = d;
        doc["artifacts"].push_back(std::move(a));
    }
    doc["notes"] = notes;
    return doc.dump(2) + "\n";
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_snapshot(const PipelineConfig& c) {
    json j;
    j["profiles"] = json::array();
    for (const auto& p : c.profile_paths) j["profiles"].push_back(p.generic_string());
    j["performance"] = c.performance_path ? json(c.performance_path->generic_string()) : json(nullptr);
    j["predictions_dir"] = c.predictions_dir ? json(c.predictions_dir->generic_string()) : json(nullptr);
    j["iou_threshold"] = c.iou_threshold;
    j["components"] = c.pca_components;
    j["k_range"] = std::to_string(c.k_range.first) + ".." + std::to_string(c.k_range.second);
    j["seed"] = c.seed;
    j["knn_k"] = c.knn_k;
    j["resolution"] = c.grid_resolution;
    j["correlation"] = c.method == CorrelationMethod::Pearson ? "pearson" : "spearman";
    j["output_dir"] = c.output_dir.generic_string();
    return j.dump();
}

std::string safe_name(std::string_view s) {
    std::string out;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '-' || ch == '.' || ch == '_';
        out += ok ? ch : '_';
    }
    return out;
}

template <typename Fn>
auto in_stage(std::string_view name, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError("stage " + std::string(name) + ": " + e.what());
    } catch (const ComputationError& e) {
        throw ComputationError("stage " + std::string(name) + ": " + e.what());
    }
}

template <typename Writer>
std::string render(Writer&& w) {
    std::ostringstream s;
    w(s);
    return s.str();
}

struct Artifacts {
    std::map<std::string, std::string> files;
    void add(const std::string& name, std::string content) { files[name] = std::move(content); }
};

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config, Stage stage) {
    in_stage("config", [&] { validate_config(config); });

    RunManifest manifest;
    manifest.stage = std::string(to_string(stage));
    manifest.config_json = config_snapshot(config);
    Artifacts out;

    const int level = [&] {
        switch (stage) {
            case Stage::Ingest: return 0;
            case Stage::Matrix: return 1;
            case Stage::Embed: return 2;
            case Stage::Cluster: return 3;
            case Stage::Link: return 4;
            case Stage::Ensemble: return -1;
            default: return 5;
        }
    }();
    const bool write_csv = stage != Stage::Report;
    const bool write_plots = stage == Stage::Report || stage == Stage::Pipeline;

    std::vector<DissectProfile> profiles;
    std::optional<ConceptMatrix> matrix;
    std::optional<LceEmbedding> embedding;
    std::optional<ClusteringResult> clustering;
    std::optional<PerformanceTable> perf;

    if (level >= 0) {
        in_stage("ingest", [&] {
            if (config.profile_paths.size() < 2) throw ValidationError("need at least two profile files");
            std::set<std::string> names;
            for (const auto& path : config.profile_paths) {
                const auto bytes = read_file(path);
                manifest.inputs.emplace_back(path.generic_string(), sha256_hex(bytes));
                DissectProfile p;
                try {
                    p = parse_profile(bytes);
                } catch (const ValidationError& e) {
                    throw ValidationError(path.string() + ": " + e.what());
                }
                if (!names.insert(p.model_name).second)
                    throw ValidationError("model '" + p.model_name + "' appears in more than one profile");
                profiles.push_back(filter_by_iou(p, config.iou_threshold));
            }
            if (write_csv) {
                out.add("abstract_profiles.csv", render([&](std::ostream& s) {
                            s << "model,mode,object,part,material,color,assigned_units,layer_width\n";
                            for (const auto& p : profiles) {
                                for (auto mode : {AbstractionMode::All, AbstractionMode::Unique}) {
                                    const auto a = abstract_profile(p, mode);
                                    s << csv_escape(p.model_name) << ',' << to_string(mode);
                                    for (auto cat : kCategories) s << ',' << a[cat];
                                    s << ',' << p.assigned_count() << ',' << p.layer_width << '\n';
                                }
                            }
                        }));
            }
        });
    }

    if (level >= 1) {
        in_stage("matrix", [&] {
            const auto superset = build_superset(profiles);
            matrix = build_matrix(profiles, superset);
            if (write_csv) {
                out.add("superset.csv", render([&](std::ostream& s) { write_superset_csv(s, superset); }));
                out.add("matrix.csv", render([&](std::ostream& s) { write_normalized_csv(s, *matrix); }));
                out.add("raw_counts.csv", render([&](std::ostream& s) { write_raw_counts_csv(s, *matrix); }));
            }
        });
    }

    if (level >= 2) {
        in_stage("embed", [&] {
            const int n = static_cast<int>(matrix->model_names.size());
            const int c = static_cast<int>(matrix->superset.size());
            const int k = std::min({config.pca_components, n - 1, c});
            if (k < config.pca_components)
                manifest.notes.push_back("components reduced from " + std::to_string(config.pca_components) + " to " +
                                         std::to_string(k) + " (models=" + std::to_string(n) +
                                         ", concepts=" + std::to_string(c) + ")");
            embedding = fit_pca(*matrix, k);
            if (write_csv) {
                out.add("embedding.csv", render([&](std::ostream& s) { write_embedding_csv(s, *embedding); }));
                out.add("loadings.csv", render([&](std::ostream& s) { write_loadings_csv(s, *embedding); }));
                out.add("variance.csv", render([&](std::ostream& s) { write_variance_csv(s, *embedding); }));
            }
        });
    }

    if (level >= 3) {
        in_stage("cluster", [&] {
            const int n = static_cast<int>(matrix->model_names.size());
            const int lo = std::min(config.k_range.first, n);
            const int hi = std::min(config.k_range.second, n);
            if (hi < config.k_range.second)
                manifest.notes.push_back("k range clamped to " + std::to_string(lo) + ".." + std::to_string(hi));
            clustering = elbow_select(matrix->normalized, matrix->model_names, lo, hi, config.seed);
            clustering->region_labels = label_regions(*clustering, *embedding);
            if (write_csv) {
                out.add("clusters.csv", render([&](std::ostream& s) { write_clusters_csv(s, *clustering); }));
                out.add("inertia.csv", render([&](std::ostream& s) { write_inertia_csv(s, *clustering); }));
            }
        });
    }

    if (level >= 4) {
        in_stage("link", [&] {
            const auto cat = axis_category_correlations(*embedding, profiles, config.method);
            for (const auto& w : cat.warnings) manifest.notes.push_back("axis_category_corr: " + w);
            if (write_csv)
                out.add("axis_category_corr.csv", render([&](std::ostream& s) { write_correlation_csv(s, cat); }));
            if (!config.performance_path) return;

            const auto bytes = read_file(*config.performance_path);
            manifest.inputs.emplace_back(config.performance_path->generic_string(), sha256_hex(bytes));
            std::istringstream in(bytes);
            perf = PerformanceTable::from_csv(in);
            const auto report = axis_performance_correlations(*embedding, *perf, config.method);
            for (const auto& w : report.warnings) manifest.notes.push_back("axis_perf_corr: " + w);
            if (write_csv)
                out.add("axis_perf_corr.csv", render([&](std::ostream& s) { write_correlation_csv(s, report); }));

            if (embedding->components() < 2) {
                manifest.notes.push_back("performance fields skipped: fewer than two components");
                return;
            }
            for (const auto& g : perf->groups()) {
                std::size_t available = 0;
                for (const auto& r : perf->group_records(g)) available += embedding->model_index(r.model) >= 0;
                if (available < static_cast<std::size_t>(config.knn_k)) {
                    manifest.notes.push_back("field " + g.key() + " skipped: " + std::to_string(available) +
                                             " models < knn k " + std::to_string(config.knn_k));
                    continue;
                }
                const auto field = knn_field(*embedding, *perf, g, {0, 1}, config.knn_k, config.grid_resolution);
                if (write_csv)
                    out.add("field_" + safe_name(g.task) + "_" + safe_name(g.dataset) + "_" + safe_name(g.metric) +
                                ".csv",
                            render([&](std::ostream& s) { write_field_csv(s, field); }));
            }
        });
    }

    std::vector<EnsembleGainMatrix> gains;
    if (stage == Stage::Ensemble || (level >= 5 && config.predictions_dir)) {
        in_stage("ensemble", [&] {
            if (!config.predictions_dir) throw ValidationError("no predictions directory given");
            std::vector<fs::path> datasets;
            for (const auto& e : fs::directory_iterator(*config.predictions_dir))
                if (e.is_directory()) datasets.push_back(e.path());
            std::sort(datasets.begin(), datasets.end());
            for (const auto& dir : datasets) {
                std::vector<fs::path> files;
                for (const auto& e : fs::directory_iterator(dir))
                    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
                std::sort(files.begin(), files.end());
                const auto dataset = dir.filename().string();
                if (files.size() < 2) {
                    manifest.notes.push_back("dataset " + dataset + " skipped: fewer than two prediction files");
                    continue;
                }
                std::vector<PredictionSet> sets;
                for (const auto& f : files) {
                    const auto bytes = read_file(f);
                    manifest.inputs.emplace_back(f.generic_string(), sha256_hex(bytes));
                    std::istringstream in(bytes);
                    sets.push_back(read_predictions_csv(in, f.stem().string(), dataset));
                }
                gains.push_back(gain_matrix(sets));
                if (write_csv)
                    out.add("ensemble_gain_" + safe_name(dataset) + ".csv",
                            render([&](std::ostream& s) { write_gain_csv(s, gains.back()); }));
            }
            if (gains.empty()) throw ValidationError("no dataset with at least two prediction files");
            manifest.notes.push_back(
                "ensemble weights use accuracies measured on the same samples being ensembled (optimistic)");
        });
    }

    if (write_plots) {
        in_stage("report", [&] {
            if (embedding->components() >= 2)
                out.add("lce_scatter.svg", emit_scatter(*embedding, *clustering, {0, 1}));
            else
                manifest.notes.push_back("scatter skipped: fewer than two components");
            out.add("elbow.svg", emit_elbow(*clustering));
            for (const auto& g : gains) out.add("heatmap_" + safe_name(g.dataset) + ".svg", emit_heatmap(g));

            std::ostringstream md;
            md << "# LCE report\n\n";
            md << "Models: " << embedding->model_names.size() << ", concepts: " << matrix->superset.size() << " (";
            for (auto cat : kCategories)
                md << (cat == ConceptCategory::Object ? "" : ", ") << matrix->superset.total(cat) << ' ' << to_string(cat);
            md << ")\n\nIoU threshold: " << format_real(config.iou_threshold) << "\n\n## Explained variance\n\n";
            double cumulative = 0.0;
            for (int c = 0; c < embedding->components(); ++c) {
                cumulative += embedding->explained_variance_ratio[c];
                md << "- PC" << (c + 1) << ": " << format_fixed(100 * embedding->explained_variance_ratio[c], 2)
                   << "% (cumulative " << format_fixed(100 * cumulative, 2) << "%)\n";
            }
            md << "\n## Clusters (k = " << clustering->k << ")\n\n";
            for (int c = 0; c < clustering->k; ++c) {
                md << "- cluster " << c << " [" << to_string(clustering->region_labels.at(c)) << "]:";
                for (std::size_t i = 0; i < clustering->model_names.size(); ++i)
                    if (clustering->assignments[i] == c) md << ' ' << clustering->model_names[i];
                md << '\n';
            }
            md << "\n## Top loadings\n\n";
            for (int c = 0; c < embedding->components(); ++c) {
                md << "- PC" << (c + 1) << ':';
                for (const auto& [name, coef] : top_loadings(*embedding, c, 5))
                    md << ' ' << name << " (" << format_fixed(coef, 3) << ')';
                md << '\n';
            }
            if (!gains.empty()) {
                md << "\n## Ensembles\n\nWeights are derived from accuracies on the evaluated samples themselves, "
                      "so gains are optimistic.\n";
                for (const auto& g : gains) {
                    double best = g.gain(0, 1);
                    std::string pair = g.model_names[0] + " + " + g.model_names[1];
                    for (Eigen::Index i = 0; i < g.gain.rows(); ++i)
                        for (Eigen::Index j = i + 1; j < g.gain.cols(); ++j)
                            if (g.gain(i, j) > best) {
                                best = g.gain(i, j);
                                pair = g.model_names[static_cast<std::size_t>(i)] + " + " +
                                       g.model_names[static_cast<std::size_t>(j)];
                            }
                    md << "- " << g.dataset << ": best pair " << pair << " (gain " << format_fixed(best, 4) << ")\n";
                }
            }
            out.add("report.md", md.str());
        });
    }

    for (const auto& [name, content] : out.files) manifest.artifacts.emplace_back(name, sha256_hex(content));
    manifest.artifacts.emplace_back("manifest.json", "");
    std::sort(manifest.artifacts.begin(), manifest.artifacts.end());

    in_stage("write", [&] {
        fs::path out_dir = config.output_dir.lexically_normal();
        if (!out_dir.has_filename()) out_dir = out_dir.parent_path();
        fs::path staging = out_dir;
        staging += ".partial";
        try {
            fs::remove_all(staging);
            fs::create_directories(staging);
            for (const auto& [name, content] : out.files) {
                std::ofstream f(staging / name, std::ios::binary);
                f << content;
                if (!f) throw ComputationError("failed writing " + name);
            }
            std::ofstream m(staging / "manifest.json", std::ios::binary);
            m << manifest.to_json();
            if (!m) throw ComputationError("failed writing manifest.json");
            m.close();
            if (fs::exists(out_dir)) fs::remove_all(out_dir);
            if (out_dir.has_parent_path()) fs::create_directories(out_dir.parent_path());
            fs::rename(staging, out_dir);
        } catch (const fs::filesystem_error& e) {
            std::error_code ec;
            fs::remove_all(staging, ec);
            throw ComputationError(e.what());
        } catch (...) {
            std::error_code ec;
            fs::remove_all(staging, ec);
            throw;
        }
    });
    return manifest;
}

}  // namespace lce
