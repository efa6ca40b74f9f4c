#include <doctest.h>

#include <random>
#include <sstream>

#include "lce/ensemble.hpp"
#include "lce/errors.hpp"
#include "oracles.hpp"

namespace {

/// Ten samples, two classes, label 0 everywhere; the model is right on the
/// first `hits` samples.
lce::PredictionSet right_on_first(const std::string& name, int hits, int n = 10) {
    lce::PredictionSet p;
    p.model_name = name;
    p.dataset = "d";
    p.probs.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        p.sample_ids.push_back("s" + std::to_string(i));
        p.labels.push_back(0);
        const double p0 = i < hits ? 0.9 : 0.2;
        p.probs.row(i) << p0, 1.0 - p0;
    }
    return p;
}

lce::PredictionSet from_toy(const std::string& name, const oracle::ToyModel& t, const std::vector<int>& labels) {
    lce::PredictionSet p;
    p.model_name = name;
    p.dataset = "d";
    p.labels = labels;
    p.probs.resize(static_cast<Eigen::Index>(t.probs.size()), static_cast<Eigen::Index>(t.probs[0].size()));
    for (std::size_t i = 0; i < t.probs.size(); ++i) {
        p.sample_ids.push_back("s" + std::to_string(i));
        for (std::size_t c = 0; c < t.probs[i].size(); ++c)
            p.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = t.probs[i][c];
    }
    return p;
}

oracle::ToyModel random_toy(std::mt19937_64& rng, std::size_t samples, std::size_t classes) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    oracle::ToyModel t;
    for (std::size_t i = 0; i < samples; ++i) {
        oracle::Vec row(classes);
        double s = 0;
        for (auto& v : row) s += (v = u(rng));
        for (auto& v : row) v /= s;
        t.probs.push_back(row);
    }
    return t;
}

}  // namespace

TEST_CASE("argmax ties go to the lowest class") {
    Eigen::RowVectorXd r(4);
    r << 0.3, 0.3, 0.1, 0.3;
    CHECK(lce::argmax(r) == 0);
    r << 0.1, 0.4, 0.1, 0.4;
    CHECK(lce::argmax(r) == 1);
}

TEST_CASE("soft-vote weights") {
    const auto a = right_on_first("a", 7), b = right_on_first("b", 6);
    CHECK(lce::accuracy(a) == doctest::Approx(0.7));
    const auto v = lce::soft_vote_pair(a, b);
    CHECK(v.w1 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v.w2 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(v.w1 + v.w2 == doctest::Approx(1.0).epsilon(1e-15));
    const auto flipped = lce::soft_vote_pair(b, a);
    CHECK(flipped.w2 == doctest::Approx(0.6).epsilon(1e-12));

    const auto tie = lce::soft_vote_pair(a, a);
    CHECK(tie.w1 == 0.5);
    CHECK(tie.w2 == 0.5);
    CHECK((tie.probs - a.probs).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("delta clamp reproduces the better model") {
    const auto good = right_on_first("good", 10), bad = right_on_first("bad", 0);
    const auto v = lce::soft_vote_pair(bad, good);
    CHECK(v.w1 == 0.0);
    CHECK(v.w2 == 1.0);
    for (Eigen::Index i = 0; i < v.probs.rows(); ++i) CHECK(lce::argmax(v.probs.row(i)) == lce::argmax(good.probs.row(i)));
}

TEST_CASE("gain matrix: identical models, symmetry, zero diagonal") {
    const auto a = right_on_first("a", 7);
    auto twin = a;
    twin.model_name = "twin";
    const std::vector<lce::PredictionSet> sets{a, twin, right_on_first("c", 3)};
    const auto m = lce::gain_matrix(sets);
    CHECK(m.gain(0, 1) == 0.0);
    CHECK(m.gain == m.gain.transpose());
    CHECK(m.gain.diagonal().isZero(0));
    CHECK(m.display()(2, 2) == doctest::Approx(0.3));
    std::ostringstream csv;
    lce::write_gain_csv(csv, m);
    CHECK(csv.str().rfind("model,a,twin,c\na,0.700000000,0.000000000,", 0) == 0);
}

TEST_CASE("gain matrix agrees with per-sample brute force") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t models = 3 + trial % 3, samples = 6 + trial % 10, classes = 3;
        std::vector<int> labels(samples);
        std::uniform_int_distribution<int> lab(0, static_cast<int>(classes) - 1);
        for (auto& l : labels) l = lab(rng);
        std::vector<oracle::ToyModel> toys;
        std::vector<lce::PredictionSet> sets;
        for (std::size_t m = 0; m < models; ++m) {
            toys.push_back(random_toy(rng, samples, classes));
            sets.push_back(from_toy("m" + std::to_string(m), toys.back(), labels));
        }
        const auto got = lce::gain_matrix(sets).display();
        const auto want = oracle::brute_gain(toys, labels);
        for (std::size_t i = 0; i < models; ++i)
            for (std::size_t j = 0; j < models; ++j)
                CHECK(std::abs(got(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - want[i][j]) < 1e-12);
    }
}

TEST_CASE("class relabeling leaves accuracy and gain unchanged") {
    std::mt19937_64 rng(31);
    const std::vector<int> labels{0, 1, 2, 1, 0, 2, 2, 1};
    std::vector<lce::PredictionSet> sets, permuted;
    const std::vector<int> perm{2, 0, 1};
    for (int m = 0; m < 3; ++m) {
        sets.push_back(from_toy("m" + std::to_string(m), random_toy(rng, labels.size(), 3), labels));
        auto p = sets.back();
        for (Eigen::Index i = 0; i < p.probs.rows(); ++i) {
            for (int c = 0; c < 3; ++c) p.probs(i, perm[static_cast<std::size_t>(c)]) = sets.back().probs(i, c);
            p.labels[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        permuted.push_back(p);
    }
    const auto a = lce::gain_matrix(sets), b = lce::gain_matrix(permuted);
    CHECK((a.display() - b.display()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("prediction CSV parsing and validation") {
    std::istringstream ok("sample_id,label,p_0,p_1\nx,1,0.25,0.75\ny,0,0.5,0.5\n");
    const auto p = lce::read_predictions_csv(ok, "m", "d");
    CHECK(p.n_samples() == 2);
    CHECK(p.n_classes() == 2);
    CHECK(lce::accuracy(p) == 1.0);

    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(lce::read_predictions_csv(in, "m", "d"), lce::ValidationError);
    };
    bad("sample_id,label,p_0,p_1\nx,1,0.25,0.25\n");
    bad("sample_id,label,p_0,p_1\nx,2,0.5,0.5\n");
    bad("sample_id,label,p_0,p_1\nx,1,-0.5,1.5\n");
    bad("sample,label,p_0\nx,0,1\n");
    bad("sample_id,label,p_0,p_1\n");

    auto other = right_on_first("o", 3);
    other.dataset = "e";
    CHECK_THROWS_AS(lce::soft_vote_pair(right_on_first("a", 3), other), lce::ValidationError);
    CHECK_THROWS_AS(lce::soft_vote_pair(right_on_first("a", 3), right_on_first("b", 3, 8)), lce::ValidationError);
}
