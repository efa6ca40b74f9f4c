#include "lce/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

void PredictionSet::validate() const {
    const std::string where = "predictions " + model_name + "/" + dataset;
    if (labels.empty()) throw ValidationError(where + ": no samples");
    if (sample_ids.size() != labels.size() || static_cast<std::size_t>(probs.rows()) != labels.size())
        throw ValidationError(where + ": sample count mismatch");
    if (probs.cols() < 1) throw ValidationError(where + ": no classes");
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= probs.cols())
            throw ValidationError(where + ": label " + std::to_string(y) + " out of range on sample " +
                                  sample_ids[static_cast<std::size_t>(i)]);
        if ((probs.row(i).array() < 0.0).any() || !probs.row(i).allFinite())
            throw ValidationError(where + ": invalid probability on sample " + sample_ids[static_cast<std::size_t>(i)]);
        if (std::abs(probs.row(i).sum() - 1.0) > 1e-6)
            throw ValidationError(where + ": probabilities of sample " + sample_ids[static_cast<std::size_t>(i)] +
                                  " do not sum to 1");
    }
}

PredictionSet read_predictions_csv(std::istream& in, std::string model_name, std::string dataset) {
    PredictionSet p;
    p.model_name = std::move(model_name);
    p.dataset = std::move(dataset);
    const std::string where = "predictions " + p.model_name + "/" + p.dataset;

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(where + ": empty file");
    const auto header = csv_split(line);
    if (header.size() < 3 || header[0] != "sample_id" || header[1] != "label")
        throw ValidationError(where + ": header must be sample_id,label,p_0,...");
    const auto k = header.size() - 2;
    for (std::size_t c = 0; c < k; ++c) {
        if (header[c + 2] != "p_" + std::to_string(c))
            throw ValidationError(where + ": expected column p_" + std::to_string(c));
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != header.size())
            throw ValidationError(where + " line " + std::to_string(line_no) + ": wrong field count");
        try {
            p.sample_ids.push_back(trim(f[0]));
            p.labels.push_back(std::stoi(f[1]));
            std::vector<double> row(k);
            for (std::size_t c = 0; c < k; ++c) row[c] = std::stod(f[c + 2]);
            rows.push_back(std::move(row));
        } catch (const std::logic_error&) {
            throw ValidationError(where + " line " + std::to_string(line_no) + ": bad number");
        }
    }
    p.probs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < k; ++c) p.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    p.validate();
    return p;
}

PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name, std::string dataset) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open predictions file " + path.string());
    return read_predictions_csv(in, std::move(model_name), std::move(dataset));
}

int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < row.size(); ++c) {
        if (row[c] > row[best]) best = c;
    }
    return static_cast<int>(best);
}

double accuracy(const Eigen::MatrixXd& probs, std::span<const int> labels) {
    if (labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i) hits += argmax(probs.row(i)) == labels[static_cast<std::size_t>(i)];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double accuracy(const PredictionSet& preds) { return accuracy(preds.probs, preds.labels); }

namespace {

void check_compatible(const PredictionSet& a, const PredictionSet& b) {
    if (a.dataset != b.dataset)
        throw ValidationError("ensemble: datasets differ (" + a.dataset + " vs " + b.dataset + ")");
    if (a.sample_ids != b.sample_ids || a.labels != b.labels)
        throw ValidationError("ensemble: sample order or labels differ between " + a.model_name + " and " +
                              b.model_name);
    if (a.n_classes() != b.n_classes())
        throw ValidationError("ensemble: class counts differ between " + a.model_name + " and " + b.model_name);
}

}  // namespace

SoftVote soft_vote_pair(const PredictionSet& p1, const PredictionSet& p2) {
    check_compatible(p1, p2);
    const double a1 = accuracy(p1), a2 = accuracy(p2);
    const double delta = std::min(std::abs(a1 - a2), 0.5);
    SoftVote v;
    if (a1 >= a2) {
        v.w1 = 0.5 + delta;
        v.w2 = 0.5 - delta;
    } else {
        v.w1 = 0.5 - delta;
        v.w2 = 0.5 + delta;
    }
    v.probs = v.w1 * p1.probs + v.w2 * p2.probs;
    return v;
}

Eigen::MatrixXd EnsembleGainMatrix::display() const {
    Eigen::MatrixXd d = gain;
    d.diagonal() = solo_accuracy;
    return d;
}

EnsembleGainMatrix gain_matrix(std::span<const PredictionSet> sets) {
    if (sets.size() < 2) throw ValidationError("gain_matrix: need at least two prediction sets");
    for (std::size_t i = 1; i < sets.size(); ++i) check_compatible(sets[0], sets[i]);

    const auto n = static_cast<Eigen::Index>(sets.size());
    EnsembleGainMatrix m;
    m.dataset = sets[0].dataset;
    m.solo_accuracy.resize(n);
    m.gain = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.model_names.push_back(sets[static_cast<std::size_t>(i)].model_name);
        m.solo_accuracy[i] = accuracy(sets[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& a = sets[static_cast<std::size_t>(i)];
            const auto& b = sets[static_cast<std::size_t>(j)];
            const auto vote = soft_vote_pair(a, b);
            const double g = accuracy(vote.probs, a.labels) - std::max(m.solo_accuracy[i], m.solo_accuracy[j]);
            m.gain(i, j) = g;
            m.gain(j, i) = g;
        }
    }
    return m;
}

void write_gain_csv(std::ostream& out, const EnsembleGainMatrix& m) {
    const auto d = m.display();
    out << "model";
    for (const auto& name : m.model_names) out << ',' << csv_escape(name);
    out << '\n';
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        out << csv_escape(m.model_names[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < d.cols(); ++j) out << ',' << format_fixed(d(i, j), 9);
        out << '\n';
    }
}

}  // namespace lce
