#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lce/concept_matrix.hpp"

namespace lce {

/// Learned Concepts Embedding: principal components of the normalized
/// concept matrix.
///
/// scores   = (rows - column_means) * loadings^T      (models x k)
/// loadings = unit-norm, mutually orthogonal rows     (k x concepts)
///
/// Each loading row is sign-normalized so that its entry of largest magnitude
/// is positive (earliest index wins a tie).
struct LceEmbedding {
    std::vector<std::string> model_names;
    std::vector<Concept> concepts;
    Eigen::MatrixXd scores;
    Eigen::MatrixXd loadings;
    Eigen::VectorXd explained_variance_ratio;
    Eigen::VectorXd column_means;

    int components() const { return static_cast<int>(loadings.rows()); }
    /// Row index of a model, or -1.
    int model_index(const std::string& name) const;
};

inline constexpr int kDefaultComponents = 3;

/// PCA on the covariance (divisor n-1) of the mean-centered rows.
/// Requires at least two rows and 1 <= k <= min(rows-1, cols); throws
/// ValidationError otherwise and ComputationError when all rows are equal.
LceEmbedding fit_pca(const Eigen::MatrixXd& data, std::vector<std::string> row_names,
                     std::vector<Concept> columns, int k);

LceEmbedding fit_pca(const ConceptMatrix& matrix, int k = kDefaultComponents);

/// Coordinates of a new row in an existing embedding.
Eigen::VectorXd project(const LceEmbedding& embedding, const Eigen::VectorXd& row);

/// The n concepts with the largest |coefficient| on one component, ties by name.
std::vector<std::pair<std::string, double>> top_loadings(const LceEmbedding& embedding,
                                                         int component, std::size_t n);

/// Sign convention helper, exposed for tests: flips `v` in place so that its
/// largest-magnitude entry is positive.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v);

void write_embedding_csv(std::ostream& out, const LceEmbedding& e);
void write_loadings_csv(std::ostream& out, const LceEmbedding& e);
void write_variance_csv(std::ostream& out, const LceEmbedding& e);

}  // namespace lce
