#include "lce/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

int LceEmbedding::model_index(const std::string& name) const {
    auto it = std::find(model_names.begin(), model_names.end(), name);
    return it == model_names.end() ? -1 : static_cast<int>(it - model_names.begin());
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best_abs) {
            best_abs = std::abs(v[i]);
            best = i;
        }
    }
    if (v.size() > 0 && v[best] < 0.0) v = -v;
}

LceEmbedding fit_pca(const Eigen::MatrixXd& data, std::vector<std::string> row_names,
                     std::vector<Concept> columns, int k) {
    const auto n = data.rows();
    const auto d = data.cols();
    if (n < 2) throw ValidationError("fit_pca: need at least two models");
    if (row_names.size() != static_cast<std::size_t>(n) || columns.size() != static_cast<std::size_t>(d))
        throw ValidationError("fit_pca: name lists do not match matrix shape");
    if (k < 1 || k > std::min<Eigen::Index>(n - 1, d))
        throw ValidationError("fit_pca: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(std::min<Eigen::Index>(n - 1, d)) + "]");

    bool all_equal = true;
    for (Eigen::Index i = 1; i < n && all_equal; ++i) all_equal = (data.row(i) == data.row(0));
    if (all_equal) throw ComputationError("fit_pca: all rows identical (zero total variance)");

    LceEmbedding e;
    e.model_names = std::move(row_names);
    e.concepts = std::move(columns);
    e.column_means = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - e.column_means.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw ComputationError("fit_pca: eigen decomposition failed");
    // Ascending order from the solver; clamp round-off negatives.
    const Eigen::VectorXd evals = solver.eigenvalues().cwiseMax(0.0);
    const double total = evals.sum();
    if (!(total > 0.0)) throw ComputationError("fit_pca: zero total variance");

    e.loadings.resize(k, d);
    e.explained_variance_ratio.resize(k);
    for (int c = 0; c < k; ++c) {
        const Eigen::Index src = d - 1 - c;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        normalize_sign(v);
        e.loadings.row(c) = v.transpose();
        e.explained_variance_ratio[c] = evals[src] / total;
    }
    e.scores = centered * e.loadings.transpose();
    return e;
}

LceEmbedding fit_pca(const ConceptMatrix& matrix, int k) {
    return fit_pca(matrix.normalized, matrix.model_names, matrix.superset.concepts(), k);
}

Eigen::VectorXd project(const LceEmbedding& embedding, const Eigen::VectorXd& row) {
    if (row.size() != embedding.column_means.size())
        throw ValidationError("project: row has " + std::to_string(row.size()) + " entries, expected " +
                              std::to_string(embedding.column_means.size()));
    return embedding.loadings * (row - embedding.column_means);
}

std::vector<std::pair<std::string, double>> top_loadings(const LceEmbedding& embedding,
                                                         int component, std::size_t n) {
    if (component < 0 || component >= embedding.components())
        throw ValidationError("top_loadings: component " + std::to_string(component) + " out of range");
    std::vector<std::pair<std::string, double>> all;
    all.reserve(embedding.concepts.size());
    for (std::size_t j = 0; j < embedding.concepts.size(); ++j)
        all.emplace_back(embedding.concepts[j].name, embedding.loadings(component, static_cast<Eigen::Index>(j)));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        const double fa = std::abs(a.second), fb = std::abs(b.second);
        if (fa != fb) return fa > fb;
        return a.first < b.first;
    });
    if (all.size() > n) all.resize(n);
    return all;
}

void write_embedding_csv(std::ostream& out, const LceEmbedding& e) {
    out << "model";
    for (int c = 0; c < e.components(); ++c) out << ",pc" << (c + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < e.scores.rows(); ++i) {
        out << csv_escape(e.model_names[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < e.scores.cols(); ++c) out << ',' << format_fixed(e.scores(i, c), 9);
        out << '\n';
    }
}

void write_loadings_csv(std::ostream& out, const LceEmbedding& e) {
    out << "component,concept,category,coefficient\n";
    for (int c = 0; c < e.components(); ++c) {
        for (std::size_t j = 0; j < e.concepts.size(); ++j) {
            out << (c + 1) << ',' << csv_escape(e.concepts[j].name) << ',' << to_string(e.concepts[j].category)
                << ',' << format_fixed(e.loadings(c, static_cast<Eigen::Index>(j)), 9) << '\n';
        }
    }
}

void write_variance_csv(std::ostream& out, const LceEmbedding& e) {
    out << "component,ratio,cumulative\n";
    double cumulative = 0.0;
    for (int c = 0; c < e.components(); ++c) {
        cumulative += e.explained_variance_ratio[c];
        out << (c + 1) << ',' << format_fixed(e.explained_variance_ratio[c], 9) << ','
            << format_fixed(cumulative, 9) << '\n';
    }
}

}  // namespace lce
