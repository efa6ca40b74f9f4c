#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lce/clustering.hpp"
#include "lce/correlation.hpp"
#include "lce/embedding.hpp"
#include "lce/profile.hpp"

namespace lce {

inline constexpr std::string_view kToolName = "lcemap";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct PipelineConfig {
    std::vector<std::filesystem::path> profile_paths;
    std::optional<std::filesystem::path> performance_path;
    std::optional<std::filesystem::path> predictions_dir;
    double iou_threshold = kDefaultIouThreshold;
    int pca_components = kDefaultComponents;
    std::pair<int, int> k_range{1, 8};
    std::uint64_t seed = kDefaultSeed;
    int knn_k = kDefaultKnnK;
    int grid_resolution = kDefaultResolution;
    CorrelationMethod method = CorrelationMethod::Pearson;
    std::filesystem::path output_dir = "lce_out";
};

/// Load a JSON config. Relative paths are resolved against the config file's
/// directory. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);

/// Parse "1..8", "1-8" or "1:8".
std::pair<int, int> parse_k_range(std::string_view text);

/// Checks value ranges and that every input path exists. Throws ValidationError.
void validate_config(const PipelineConfig& config);

enum class Stage { Ingest, Matrix, Embed, Cluster, Link, Ensemble, Report, Pipeline };

std::string_view to_string(Stage s);

struct RunManifest {
    std::string stage;
    std::string config_json;  // canonical snapshot
    std::vector<std::pair<std::string, std::string>> inputs;     // path, sha256
    std::vector<std::pair<std::string, std::string>> artifacts;  // name, sha256
    std::vector<std::string> notes;

    std::string to_json() const;
};

/// Run the stages needed for `stage` and write its artifacts plus
/// manifest.json into config.output_dir. Artifacts are staged in memory and
/// in a sibling directory, so a failure leaves no partial output. Errors are
/// rethrown with the stage name prefixed.
RunManifest run_pipeline(const PipelineConfig& config, Stage stage = Stage::Pipeline);

std::string sha256_hex(std::string_view bytes);

}  // namespace lce
