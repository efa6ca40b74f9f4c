#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lce/correlation.hpp"
#include "lce/ensemble.hpp"
#include "lce/profile.hpp"

namespace lce {

/// Parameters of a synthetic bundle with planted structure.
struct FixtureSpec {
    int models = 9;
    int clusters = 3;
    std::array<int, 4> concepts_per_category{12, 10, 6, 4};  // object, part, material, color
    int samples = 60;
    int classes = 5;
    std::vector<std::string> datasets{"aircraft", "dtd"};
    std::size_t layer_width = 2048;
};

/// Performance group whose values are an increasing affine map of the first
/// principal component score.
inline const PerfGroup kPlantedPc1Group{"planted", "pc1", "score"};

struct FixtureBundle {
    std::vector<DissectProfile> profiles;
    PerformanceTable performance;
    std::vector<PredictionSet> predictions;
    /// Planted cluster of each model, numbered by first appearance.
    std::vector<int> partition;
    std::uint64_t seed = 0;
    int clusters = 0;
};

/// Cluster structure is planted in concept-count space: each cluster draws a
/// base count per concept and members jitter it by at most one unit. Every
/// profile also carries unassigned units and sub-threshold (iou < 0.04)
/// assignments that the default filter removes. Throws ValidationError on an
/// infeasible spec.
FixtureBundle generate_fixture(const FixtureSpec& spec, std::uint64_t seed);

/// Writes profiles/<model>.json, performance.csv,
/// predictions/<dataset>/<model>.csv, ground_truth.json and config.json.
/// Returns the written paths relative to `dir`, sorted.
std::vector<std::string> write_fixture(const FixtureBundle& bundle, const std::filesystem::path& dir);

}  // namespace lce
