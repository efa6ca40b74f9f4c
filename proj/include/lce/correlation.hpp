#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lce/embedding.hpp"
#include "lce/profile.hpp"

namespace lce {

enum class CorrelationMethod { Pearson, Spearman };

/// Sample Pearson correlation. Throws ValidationError on length mismatch or
/// fewer than three points, ComputationError when either vector is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

double correlate(std::span<const double> x, std::span<const double> y, CorrelationMethod method);

struct PerformanceRecord {
    std::string model;
    std::string task;
    std::string dataset;
    std::string metric;
    double value = 0.0;
};

/// (task, dataset, metric) key.
struct PerfGroup {
    std::string task;
    std::string dataset;
    std::string metric;

    std::string key() const { return task + "/" + dataset + "/" + metric; }
    auto operator<=>(const PerfGroup&) const = default;
};

class PerformanceTable {
public:
    PerformanceTable() = default;
    /// Throws ValidationError on duplicate keys or values outside [0,1].
    explicit PerformanceTable(std::vector<PerformanceRecord> records);

    /// Header `model,task,dataset,metric,value`.
    static PerformanceTable from_csv(std::istream& in);
    static PerformanceTable load(const std::filesystem::path& path);

    const std::vector<PerformanceRecord>& records() const { return records_; }
    /// Sorted distinct groups.
    std::vector<PerfGroup> groups() const;
    std::vector<PerformanceRecord> group_records(const PerfGroup& g) const;

private:
    std::vector<PerformanceRecord> records_;
};

struct CorrelationRow {
    std::string feature;
    int component = 0;  // zero-based
    double r = 0.0;
    std::size_t n_points = 0;
};

struct CorrelationReport {
    std::vector<CorrelationRow> rows;
    /// Rows that were dropped, with the reason.
    std::vector<std::string> warnings;
};

/// Correlate the 8 abstracted-profile features (4 categories x all/unique)
/// with every score column. Constant features are skipped with a warning.
CorrelationReport axis_category_correlations(const LceEmbedding& embedding,
                                             std::span<const DissectProfile> profiles,
                                             CorrelationMethod method = CorrelationMethod::Pearson);

/// One row per (performance group, component) that has at least three models
/// shared with the embedding and non-constant values on both sides.
CorrelationReport axis_performance_correlations(const LceEmbedding& embedding, const PerformanceTable& perf,
                                                CorrelationMethod method = CorrelationMethod::Pearson);

struct FieldPoint {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

struct PerformanceField {
    PerfGroup group;
    std::array<int, 2> axes{0, 1};
    int k_neighbors = 0;
    int resolution = 0;
    std::vector<FieldPoint> grid;  // row-major, y outer
};

inline constexpr int kDefaultKnnK = 5;
inline constexpr int kDefaultResolution = 50;

/// Uniform mean of the k nearest samples to `probe` (Euclidean). Equal
/// distances are broken by `names` lexicographically.
double knn_mean(std::span<const std::array<double, 2>> coords, std::span<const double> values,
                std::span<const std::string> names, std::array<double, 2> probe, int k);

/// KNN-interpolated performance over a resolution x resolution grid spanning
/// the score bounding box padded by 5% on each side.
PerformanceField knn_field(const LceEmbedding& embedding, const PerformanceTable& perf, const PerfGroup& group,
                           std::array<int, 2> axes = {0, 1}, int k = kDefaultKnnK,
                           int resolution = kDefaultResolution);

void write_correlation_csv(std::ostream& out, const CorrelationReport& report);
void write_field_csv(std::ostream& out, const PerformanceField& field);

}  // namespace lce
