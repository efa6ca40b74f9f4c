#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lce/embedding.hpp"

namespace lce {

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
    double shift_tolerance = 1e-9;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

struct KMeansResult {
    /// Cluster per point. Indices are canonical: numbered by first appearance
    /// in point order.
    std::vector<int> assignments;
    Eigen::MatrixXd centroids;  // k x d
    double inertia = 0.0;
    /// Inertia after every Lloyd iteration of the winning restart.
    std::vector<double> inertia_trace;
    int restart = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by
/// (inertia, restart index). Points are rows. Deterministic for a seed.
KMeansResult kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

/// Sum of squared distances of each row to its assigned centroid.
double inertia_of(const Eigen::MatrixXd& points, std::span<const int> assignments,
                  const Eigen::MatrixXd& centroids);

enum class RegionLabel { A, B, C, Other };

std::string_view to_string(RegionLabel r);

struct ClusteringResult {
    int k = 0;
    std::vector<std::string> model_names;
    std::vector<int> assignments;
    Eigen::MatrixXd centroids;
    double inertia = 0.0;
    std::vector<std::pair<int, double>> inertia_curve;
    std::map<int, RegionLabel> region_labels;

    int cluster_of(const std::string& model) const;
};

/// Index into `curve` of the elbow: both axes min-max normalized to [0,1],
/// the point farthest from the first-to-last chord wins, ties to the lower k.
/// Endpoints are only chosen when the curve has fewer than three points.
std::size_t elbow_index(std::span<const std::pair<int, double>> curve);

/// Fit every k in [k_min, k_max] and keep the elbow clustering.
ClusteringResult elbow_select(const Eigen::MatrixXd& points, std::vector<std::string> model_names,
                              int k_min, int k_max, std::uint64_t seed,
                              const KMeansOptions& options = {});

/// A/B/C labels from cluster centroids read through the first two components
/// (mean member score). A: lowest pc1+pc2; B: higher pc1 and lower pc2 than the
/// remaining cluster, which is C. Anything else, or k != 3, labels every
/// cluster Other. Throws ValidationError when the model sets differ.
std::map<int, RegionLabel> label_regions(const ClusteringResult& clustering, const LceEmbedding& embedding);

void write_clusters_csv(std::ostream& out, const ClusteringResult& c);
void write_inertia_csv(std::ostream& out, const ClusteringResult& c);

}  // namespace lce
