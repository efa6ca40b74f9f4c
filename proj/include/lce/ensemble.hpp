#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lce {

/// Per-sample class probabilities of one model on one dataset.
struct PredictionSet {
    std::string model_name;
    std::string dataset;
    std::vector<std::string> sample_ids;
    std::vector<int> labels;
    Eigen::MatrixXd probs;  // samples x classes

    std::size_t n_samples() const { return labels.size(); }
    int n_classes() const { return static_cast<int>(probs.cols()); }

    /// Throws ValidationError unless rows sum to 1 (1e-6), probabilities are
    /// non-negative, labels are in range and sizes agree.
    void validate() const;
};

/// Reads `sample_id,label,p_0,...,p_{K-1}`.
PredictionSet read_predictions_csv(std::istream& in, std::string model_name, std::string dataset);
PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name, std::string dataset);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row);

double accuracy(const Eigen::MatrixXd& probs, std::span<const int> labels);
double accuracy(const PredictionSet& preds);

struct SoftVote {
    Eigen::MatrixXd probs;
    double w1 = 0.5;  // weight on the first argument
    double w2 = 0.5;  // weight on the second argument
};

/// Weighted soft vote of two models: the more accurate one gets
/// 0.5 + min(|a - b|, 0.5), the other the remainder. On a tie the first
/// argument is treated as the better one.
SoftVote soft_vote_pair(const PredictionSet& p1, const PredictionSet& p2);

struct EnsembleGainMatrix {
    std::string dataset;
    std::vector<std::string> model_names;
    Eigen::VectorXd solo_accuracy;
    Eigen::MatrixXd gain;  // symmetric, zero diagonal

    /// Diagonal holds solo accuracy, off-diagonal the gain.
    Eigen::MatrixXd display() const;
};

/// Ensemble accuracy minus the better member's accuracy for every pair.
EnsembleGainMatrix gain_matrix(std::span<const PredictionSet> sets);

void write_gain_csv(std::ostream& out, const EnsembleGainMatrix& m);

}  // namespace lce
